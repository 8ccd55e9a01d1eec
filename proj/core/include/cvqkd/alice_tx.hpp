#pragma once

// Transmitter: Gaussian-modulated coherent states and the interleaved
// reference/quantum pulse frame.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cvqkd/model.hpp"

namespace cvqkd {

struct GmcsSequence {
    SymbolSeries symbols;
    double v_mod = 0.0;
    std::uint64_t seed = 0;
};

// X, P ~ N(0, v_mod) drawn through the hardware's polar route: Rayleigh
// amplitude with scale sqrt(v_mod) and a uniform phase. A non-zero
// repeat_period cycles the first repeat_period symbols, like the FPGA's
// fixed-length pattern memory.
GmcsSequence gen_gmcs_symbols(std::size_t n, double v_mod, std::uint64_t seed,
                              std::size_t repeat_period = 0);

enum class PulseKind : std::uint8_t { reference, quantum };

struct Pulse {
    PulseKind kind = PulseKind::reference;
    QuadratureSymbol symbol;
};

struct PulseFrame {
    std::vector<Pulse> pulses;
    double rho = 0.0;
    double ref_phase = 0.0;
    double symbol_period = 0.0;  // seconds between consecutive pulses

    std::size_t size() const noexcept { return pulses.size(); }
    SymbolSeries quantum_symbols() const;
    SymbolSeries reference_symbols() const;
    SymbolSeries all_symbols() const;
    void set_symbols(std::span<const QuadratureSymbol> symbols);
};

// Amplitude |A| of a reference pulse whose mean photon number is rho times
// the quantum ensemble's (rho * v_mod / 2).
double reference_amplitude(double rho, double v_mod);

// R, Q, R, Q, ... with one reference ahead of every quantum symbol.
PulseFrame build_frame(const GmcsSequence& seq, double rho, double ref_phase = 0.0,
                       double pulse_rate = 31.25e6);

// Sampled-trace rendering for the waveform fidelity mode: each pulse is a
// rectangular plateau of pulse_samples inside a window of period_samples.
// 4 ns pulses every 32 ns at 1 GS/s is the default.
struct WaveformShape {
    std::size_t period_samples = 32;
    std::size_t pulse_samples = 4;
    std::size_t pulse_offset = 14;
};

SymbolSeries render_waveform(std::span<const QuadratureSymbol> pulses, const WaveformShape& shape);

}  // namespace cvqkd
