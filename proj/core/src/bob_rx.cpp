#include "cvqkd/bob_rx.hpp"

#include <cmath>
#include <random>

namespace cvqkd {

namespace {

constexpr std::uint64_t kMeasureStream = 0x6d656173ULL;
constexpr std::uint64_t kShotStream = 0x73686f74ULL;
constexpr std::uint64_t kElecStream = 0x656c6563ULL;

SymbolSeries measure_snu(const PulseFrame& frame, const ReceiverModel& rx) {
    rx.validate();
    if (rx.mode != ReceiverMode::measure) fail(ErrorKind::domain, "receiver is not in measure mode");

    auto rng = seeded_engine(rx.seed, {kMeasureStream});
    std::normal_distribution<double> unit(0.0, 1.0);
    const double gain = std::sqrt(rx.eta / 2.0);
    const double elec = std::sqrt(rx.v_elec);

    SymbolSeries out;
    out.reserve(frame.size());
    for (const auto& p : frame.pulses) {
        const double shot_x = unit(rng);
        const double shot_p = unit(rng);
        const double elec_x = elec * unit(rng);
        const double elec_p = elec * unit(rng);
        out.push_back({gain * p.symbol.x + shot_x + elec_x, gain * p.symbol.p + shot_p + elec_p});
    }
    return out;
}

}  // namespace

void ReceiverModel::validate() const {
    if (!(eta > 0.0 && eta <= 1.0)) fail(ErrorKind::domain, "eta must lie in (0, 1]");
    if (!(v_elec >= 0.0) || !std::isfinite(v_elec)) fail(ErrorKind::domain, "v_elec must be >= 0");
    if (!(raw_gain > 0.0) || !std::isfinite(raw_gain)) fail(ErrorKind::domain, "raw_gain must be > 0");
}

SymbolSeries heterodyne_measure(const PulseFrame& frame, const ReceiverModel& rx) {
    return measure_snu(frame, rx);
}

SymbolSeries heterodyne_measure_raw(const PulseFrame& frame, const ReceiverModel& rx) {
    auto out = measure_snu(frame, rx);
    for (auto& s : out) s = s.scaled(rx.raw_gain);
    return out;
}

SymbolSeries acquire_noise_raw(const ReceiverModel& rx, std::size_t n_samples) {
    rx.validate();
    if (rx.mode == ReceiverMode::measure) fail(ErrorKind::domain, "noise acquisition needs a calibration mode");

    const bool with_shot = rx.mode == ReceiverMode::shot_cal;
    auto rng = seeded_engine(rx.seed, {with_shot ? kShotStream : kElecStream});
    std::normal_distribution<double> unit(0.0, 1.0);
    const double elec = std::sqrt(rx.v_elec);

    SymbolSeries out;
    out.reserve(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        QuadratureSymbol s{elec * unit(rng), elec * unit(rng)};
        if (with_shot) s = s + QuadratureSymbol{unit(rng), unit(rng)};
        out.push_back(s.scaled(rx.raw_gain));
    }
    return out;
}

CalibrationRecord calibrate(const ReceiverModel& rx, std::size_t n_samples) {
    if (n_samples < 2) fail(ErrorKind::calibration_invalid, "calibration needs at least two samples");

    ReceiverModel shot = rx;
    shot.mode = ReceiverMode::shot_cal;
    ReceiverModel dark = rx;
    dark.mode = ReceiverMode::elec_cal;

    const auto shot_raw = pooled(acquire_noise_raw(shot, n_samples));
    const auto dark_raw = pooled(acquire_noise_raw(dark, n_samples));
    const double shot_var = sample_variance(shot_raw);
    const double dark_var = sample_variance(dark_raw);
    if (!(shot_var > 0.0)) fail(ErrorKind::calibration_invalid, "shot-noise acquisition has zero variance");
    return CalibrationRecord::from_raw(shot_var, dark_var);
}

}  // namespace cvqkd
