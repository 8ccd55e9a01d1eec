#include "cvqkd/alice_tx.hpp"

#include <cmath>

namespace cvqkd {

GmcsSequence gen_gmcs_symbols(std::size_t n, double v_mod, std::uint64_t seed, std::size_t repeat_period) {
    if (!(v_mod >= 0.0) || !std::isfinite(v_mod)) fail(ErrorKind::domain, "v_mod must be >= 0");
    if (n == 0) fail(ErrorKind::domain, "symbol count must be >= 1");

    GmcsSequence seq;
    seq.v_mod = v_mod;
    seq.seed = seed;
    seq.symbols.resize(n);

    auto rng = seeded_engine(seed, {0x616c696365ULL});
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double scale = std::sqrt(v_mod);
    const std::size_t fresh = (repeat_period == 0 || repeat_period > n) ? n : repeat_period;

    for (std::size_t i = 0; i < fresh; ++i) {
        // 1 - u lies in (0, 1], keeping the log finite.
        const double amplitude = scale * std::sqrt(-2.0 * std::log(1.0 - unit(rng)));
        const double phase = two_pi * unit(rng);
        seq.symbols[i] = {amplitude * std::cos(phase), amplitude * std::sin(phase)};
    }
    for (std::size_t i = fresh; i < n; ++i) seq.symbols[i] = seq.symbols[i % fresh];
    return seq;
}

SymbolSeries PulseFrame::quantum_symbols() const {
    SymbolSeries out;
    out.reserve(pulses.size() / 2);
    for (const auto& p : pulses)
        if (p.kind == PulseKind::quantum) out.push_back(p.symbol);
    return out;
}

SymbolSeries PulseFrame::reference_symbols() const {
    SymbolSeries out;
    out.reserve(pulses.size() / 2 + 1);
    for (const auto& p : pulses)
        if (p.kind == PulseKind::reference) out.push_back(p.symbol);
    return out;
}

SymbolSeries PulseFrame::all_symbols() const {
    SymbolSeries out;
    out.reserve(pulses.size());
    for (const auto& p : pulses) out.push_back(p.symbol);
    return out;
}

void PulseFrame::set_symbols(std::span<const QuadratureSymbol> symbols) {
    if (symbols.size() != pulses.size()) fail(ErrorKind::shape, "symbol count does not match frame length");
    for (std::size_t i = 0; i < symbols.size(); ++i) pulses[i].symbol = symbols[i];
}

double reference_amplitude(double rho, double v_mod) {
    // photon number = |A|^2 / 4 = rho * v_mod / 2
    return std::sqrt(2.0 * rho * v_mod);
}

PulseFrame build_frame(const GmcsSequence& seq, double rho, double ref_phase, double pulse_rate) {
    if (!(rho > 0.0)) fail(ErrorKind::domain, "rho must be > 0");
    if (!(pulse_rate > 0.0)) fail(ErrorKind::domain, "pulse_rate must be > 0");
    if (seq.symbols.empty()) fail(ErrorKind::domain, "cannot frame an empty sequence");

    const double a = reference_amplitude(rho, seq.v_mod);
    const QuadratureSymbol ref{a * std::cos(ref_phase), a * std::sin(ref_phase)};

    PulseFrame frame;
    frame.rho = rho;
    frame.ref_phase = ref_phase;
    frame.symbol_period = 1.0 / pulse_rate;
    frame.pulses.reserve(2 * seq.symbols.size());
    for (const auto& s : seq.symbols) {
        frame.pulses.push_back({PulseKind::reference, ref});
        frame.pulses.push_back({PulseKind::quantum, s});
    }
    return frame;
}

SymbolSeries render_waveform(std::span<const QuadratureSymbol> pulses, const WaveformShape& shape) {
    if (shape.period_samples < 2 || shape.pulse_samples == 0 ||
        shape.pulse_offset + shape.pulse_samples > shape.period_samples)
        fail(ErrorKind::domain, "pulse does not fit inside its sampling period");

    SymbolSeries trace(pulses.size() * shape.period_samples);
    for (std::size_t k = 0; k < pulses.size(); ++k) {
        const std::size_t base = k * shape.period_samples + shape.pulse_offset;
        for (std::size_t j = 0; j < shape.pulse_samples; ++j) trace[base + j] = pulses[k];
    }
    return trace;
}

}  // namespace cvqkd
