#pragma once

// Phase-diverse (heterodyne) receiver with trusted detection efficiency and
// electronic noise, and the two-switch noise calibration.

#include <cstddef>
#include <cstdint>

#include "cvqkd/alice_tx.hpp"

namespace cvqkd {

enum class ReceiverMode {
    measure,
    shot_cal,  // signal switch closed, LO on
    elec_cal,  // LO switch closed too
};

struct ReceiverModel {
    double eta = 0.18;
    double v_elec = 0.021;
    std::uint64_t seed = 0;
    ReceiverMode mode = ReceiverMode::measure;
    // Volts-per-root-SNU of the digitizer chain. Only ratios enter the
    // physics; a non-unit value exercises the SNU round trip.
    double raw_gain = 1.0;

    void validate() const;
};

// X_B = sqrt(eta/2) X + n_shot + n_elec (and likewise for P), with
// n_shot ~ N(0, 1) and n_elec ~ N(0, v_elec). Output in SNU.
SymbolSeries heterodyne_measure(const PulseFrame& frame, const ReceiverModel& rx);

// Same draws as heterodyne_measure, expressed in raw digitizer units.
SymbolSeries heterodyne_measure_raw(const PulseFrame& frame, const ReceiverModel& rx);

// Raw acquisition with no optical input; the mode decides whether the
// shot-noise term is present. Requires mode shot_cal or elec_cal.
SymbolSeries acquire_noise_raw(const ReceiverModel& rx, std::size_t n_samples);

// Shot-noise then electronic-noise acquisition, each of n_samples symbols
// (2 * n_samples pooled quadrature values).
CalibrationRecord calibrate(const ReceiverModel& rx, std::size_t n_samples);

}  // namespace cvqkd
