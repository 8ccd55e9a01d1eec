#pragma once

// Offline receive chain: down-sampling, de-interleaving, reference-based
// phase recovery and pattern synchronization.

#include <cstddef>
#include <span>
#include <vector>

#include "cvqkd/model.hpp"

namespace cvqkd {

struct PeakDetection {
    SymbolSeries symbols;
    std::vector<bool> low_power;  // per symbol: window power below threshold
    std::size_t low_power_count = 0;
};

// One symbol per window of period_samples, taken at the sample of maximum
// instantaneous power x^2 + p^2.
PeakDetection detect_peaks(std::span<const QuadratureSymbol> waveform, std::size_t period_samples,
                           double low_power_threshold = 1e-12);

struct Deinterleaved {
    SymbolSeries refs;
    SymbolSeries quantum;
};

// Splits R, Q, R, Q, ... (starting with a reference).
Deinterleaved deinterleave(std::span<const QuadratureSymbol> pulses);

// Four-quadrant angle of the phasor x + i p.
double ref_phase(QuadratureSymbol ref);

// Shorter-arc mean of two angles, through the sum of their unit phasors.
double circular_midpoint(double a, double b);

struct RecoveryOptions {
    // Phase the transmitter put on every reference; the correction maps it
    // back to zero so quantum symbols land in Alice's frame.
    double tx_reference_phase = 0.0;
    // Moving average over this many reference phasors (1 = off).
    std::size_t smoothing_window = 1;
};

struct RecoveredBlock {
    SymbolSeries quantum_rx;   // phase-corrected quantum symbols
    SymbolSeries refs_rx;      // references corrected with their neighbours' phases
    std::vector<double> phase_track;  // applied correction per quantum symbol
    std::ptrdiff_t sync_offset = 0;
    std::size_t dropped = 0;   // quantum symbols without a closing reference
};

// Quantum symbol i is bracketed by refs[i] and refs[i + 1] and rotated by the
// circular midpoint of their phases.
RecoveredBlock recover_phase(std::span<const QuadratureSymbol> quantum, std::span<const QuadratureSymbol> refs,
                             const RecoveryOptions& options = {});

// Full linear cross-correlation c[L] = sum_i tx[i].x * rx[i + L].x for
// L in [-(len(tx) - 1), len(rx) - 1], via FFT.
std::vector<double> cross_correlation(std::span<const double> tx, std::span<const double> rx);

// Lag L at which rx[i + L] best matches tx[i] on the X quadrature. Throws
// sync_failure when the peak is less than min_peak_to_median times the
// median magnitude.
std::ptrdiff_t sync_offset(std::span<const QuadratureSymbol> tx, std::span<const QuadratureSymbol> rx,
                           double min_peak_to_median = 5.0);

}  // namespace cvqkd
