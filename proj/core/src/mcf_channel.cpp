#include "cvqkd/mcf_channel.hpp"

#include <cmath>
#include <string>

namespace cvqkd {

double db_to_transmittance(double loss_db) {
    if (!(loss_db >= 0.0)) fail(ErrorKind::domain, "loss must be >= 0 dB");
    return std::pow(10.0, -loss_db / 10.0);
}

double transmittance_to_db(double t) {
    if (!(t > 0.0 && t <= 1.0)) fail(ErrorKind::domain, "transmittance must lie in (0, 1]");
    return -10.0 * std::log10(t);
}

void CoreChannelParams::validate() const {
    if (core_id < 1 || core_id > kMcfCores)
        fail(ErrorKind::domain, "core_id must lie in 1.." + std::to_string(kMcfCores));
    if (!(transmittance >= 0.0 && transmittance <= 1.0))
        fail(ErrorKind::domain, "transmittance must lie in [0, 1]");
    for (double xt : crosstalk_db)
        if (std::isnan(xt) || xt < 0.0) fail(ErrorKind::domain, "crosstalk must be >= 0 dB (power coupling <= 1)");
    if (!(linewidth_hz >= 0.0) || !std::isfinite(linewidth_hz))
        fail(ErrorKind::domain, "linewidth must be >= 0");
    if (!std::isfinite(freq_offset_hz)) fail(ErrorKind::domain, "frequency offset must be finite");
    if (!(excess_noise_at_bob >= 0.0) || !std::isfinite(excess_noise_at_bob))
        fail(ErrorKind::domain, "excess noise target must be >= 0");
}

std::array<CoreChannelParams, kMcfCores> default_mcf_cores() {
    constexpr std::array<double, kMcfCores> loss = {7.4, 6.1, 6.2, 6.0, 6.2, 6.1, 6.1};
    std::array<CoreChannelParams, kMcfCores> cores{};
    for (int i = 0; i < kMcfCores; ++i) {
        auto& c = cores[i];
        c.core_id = i + 1;
        c.transmittance = db_to_transmittance(loss[i]);
        c.linewidth_hz = 20e3;
        c.freq_offset_hz = 0.0;
    }
    auto couple = [&](int a, int b) {
        cores[a - 1].crosstalk_db[b - 1] = 50.0;
        cores[b - 1].crosstalk_db[a - 1] = 50.0;
    };
    for (int outer = 2; outer <= kMcfCores; ++outer) {
        couple(1, outer);
        couple(outer, outer == kMcfCores ? 2 : outer + 1);
    }
    return cores;
}

CrosstalkMatrix::CrosstalkMatrix(std::size_t n) : n_(n), db_(n * n, kNoCoupling) {}

void CrosstalkMatrix::set_db(std::size_t victim, std::size_t source, double value) {
    db_.at(victim * n_ + source) = value;
}

void CrosstalkMatrix::set_symmetric(std::size_t a, std::size_t b, double value) {
    set_db(a, b, value);
    set_db(b, a, value);
}

double CrosstalkMatrix::amplitude_factor(std::size_t victim, std::size_t source) const {
    const double v = db(victim, source);
    return std::isinf(v) ? 0.0 : std::sqrt(std::pow(10.0, -v / 10.0));
}

void CrosstalkMatrix::validate() const {
    for (std::size_t i = 0; i < n_; ++i) {
        if (!std::isinf(db(i, i))) fail(ErrorKind::domain, "crosstalk matrix diagonal must be uncoupled");
        for (std::size_t j = 0; j < n_; ++j) {
            const double v = db(i, j);
            if (std::isnan(v) || v < 0.0) fail(ErrorKind::domain, "crosstalk must be >= 0 dB");
            if (v != db(j, i)) fail(ErrorKind::domain, "crosstalk matrix must be symmetric");
        }
    }
}

ChannelState::ChannelState(std::uint64_t seed, double initial_phase)
    : phase(initial_phase), rng(seeded_engine(seed, {0x6368616eULL})) {}

PulseFrame apply_transmittance(const PulseFrame& frame, double t) {
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::domain, "transmittance must lie in [0, 1]");
    const double k = std::sqrt(t);
    PulseFrame out = frame;
    for (auto& p : out.pulses) p.symbol = p.symbol.scaled(k);
    return out;
}

PulseFrame apply_attenuation(const PulseFrame& frame, double loss_db) {
    if (!(loss_db >= 0.0)) fail(ErrorKind::domain, "loss must be >= 0 dB");
    return apply_transmittance(frame, db_to_transmittance(loss_db));
}

std::vector<PulseFrame> apply_crosstalk(std::span<const PulseFrame> frames, const CrosstalkMatrix& xt) {
    if (xt.size() != frames.size()) fail(ErrorKind::shape, "crosstalk matrix size does not match core count");
    xt.validate();
    for (const auto& f : frames)
        if (f.size() != frames.front().size()) fail(ErrorKind::shape, "frames differ in length");

    std::vector<PulseFrame> out(frames.begin(), frames.end());
    for (std::size_t v = 0; v < frames.size(); ++v) {
        for (std::size_t s = 0; s < frames.size(); ++s) {
            const double k = xt.amplitude_factor(v, s);
            if (k == 0.0) continue;
            for (std::size_t i = 0; i < frames[v].size(); ++i)
                out[v].pulses[i].symbol = out[v].pulses[i].symbol + frames[s].pulses[i].symbol.scaled(k);
        }
    }
    return out;
}

double phase_step_variance(double linewidth_hz, double symbol_period) {
    if (!(linewidth_hz >= 0.0) || !(symbol_period >= 0.0)) fail(ErrorKind::domain, "negative linewidth or period");
    return two_pi * linewidth_hz * symbol_period;
}

PulseFrame apply_phase_noise(const PulseFrame& frame, const CoreChannelParams& params, ChannelState& state) {
    params.validate();
    const double tau = frame.symbol_period;
    const double drift = two_pi * params.freq_offset_hz * tau;
    const double sigma = std::sqrt(phase_step_variance(params.linewidth_hz, tau));
    std::normal_distribution<double> step(0.0, 1.0);

    PulseFrame out = frame;
    for (auto& p : out.pulses) {
        p.symbol = p.symbol.rotated(state.phase);
        state.phase += drift;
        if (sigma > 0.0) state.phase += sigma * step(state.rng);
    }
    state.phase = std::remainder(state.phase, two_pi);
    return out;
}

PulseFrame inject_excess_noise(const PulseFrame& frame, double eps_target, double eta, std::mt19937_64& rng) {
    if (!(eps_target >= 0.0)) fail(ErrorKind::domain, "excess noise target must be >= 0");
    if (!(eta > 0.0)) fail(ErrorKind::domain, "eta must be > 0");
    if (eps_target == 0.0) return frame;

    std::normal_distribution<double> noise(0.0, std::sqrt(eps_target / eta));
    PulseFrame out = frame;
    for (auto& p : out.pulses) {
        const double nx = noise(rng);
        const double np = noise(rng);
        p.symbol = p.symbol + QuadratureSymbol{nx, np};
    }
    return out;
}

}  // namespace cvqkd
