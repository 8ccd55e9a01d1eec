#include "cvqkd/model.hpp"

#include <limits>
#include <numeric>
#include <string>

namespace cvqkd {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::shape: return "shape";
    case ErrorKind::calibration_invalid: return "calibration_invalid";
    case ErrorKind::degenerate_reference: return "degenerate_reference";
    case ErrorKind::sync_failure: return "sync_failure";
    case ErrorKind::empty_output: return "empty_output";
    case ErrorKind::no_threshold: return "no_threshold";
    case ErrorKind::config: return "config";
    case ErrorKind::mode: return "mode";
    }
    return "unknown";
}

SystemParams SystemParams::from_mean_photon_number(double n_mean) {
    return from_mean_photon_number(n_mean, SystemParams{});
}

SystemParams SystemParams::from_mean_photon_number(double n_mean, SystemParams base) {
    base.v_mod = 2.0 * n_mean;
    return base;
}

void SystemParams::validate() const {
    if (!(v_mod >= 0.0) || !std::isfinite(v_mod))
        fail(ErrorKind::domain, "v_mod must be a finite value >= 0");
    if (!(eta > 0.0 && eta <= 1.0))
        fail(ErrorKind::domain, "eta must lie in (0, 1]");
    if (!(v_elec >= 0.0) || !std::isfinite(v_elec))
        fail(ErrorKind::domain, "v_elec must be a finite value >= 0");
    if (!(beta > 0.0 && beta <= 1.0))
        fail(ErrorKind::domain, "beta must lie in (0, 1]");
    if (!(rho > 0.0) || !std::isfinite(rho))
        fail(ErrorKind::domain, "rho must be > 0");
    if (!(pulse_rate > 0.0) || !std::isfinite(pulse_rate))
        fail(ErrorKind::domain, "pulse_rate must be > 0");
}

CalibrationRecord CalibrationRecord::from_raw(double shot_var_raw, double elec_var_raw) {
    if (!std::isfinite(shot_var_raw) || !std::isfinite(elec_var_raw) || elec_var_raw < 0.0)
        fail(ErrorKind::calibration_invalid, "calibration variances must be finite and non-negative");
    const double vacuum = shot_var_raw - elec_var_raw;
    if (!(vacuum > 0.0))
        fail(ErrorKind::calibration_invalid,
             "shot-noise variance must exceed electronic-noise variance (got shot=" +
                 std::to_string(shot_var_raw) + ", elec=" + std::to_string(elec_var_raw) + ")");

    CalibrationRecord rec;
    rec.shot_var_raw = shot_var_raw;
    rec.elec_var_raw = elec_var_raw;
    rec.snu_scale = std::sqrt(vacuum);
    rec.v_elec_snu = elec_var_raw / vacuum;
    rec.clearance_db = elec_var_raw > 0.0 ? 10.0 * std::log10(vacuum / elec_var_raw)
                                          : std::numeric_limits<double>::infinity();
    return rec;
}

SymbolSeries snu_normalize(std::span<const QuadratureSymbol> samples, const CalibrationRecord& cal) {
    const double vacuum = cal.shot_var_raw - cal.elec_var_raw;
    if (!(vacuum > 0.0))
        fail(ErrorKind::calibration_invalid, "non-positive shot-minus-electronic variance");
    const double inv = 1.0 / std::sqrt(vacuum);
    SymbolSeries out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.scaled(inv));
    return out;
}

std::optional<double> clearance(const CalibrationRecord& cal) {
    const double vacuum = cal.shot_var_raw - cal.elec_var_raw;
    if (!(vacuum > 0.0))
        fail(ErrorKind::calibration_invalid, "non-positive shot-minus-electronic variance");
    if (cal.elec_var_raw == 0.0) return std::nullopt;
    return 10.0 * std::log10(vacuum / cal.elec_var_raw);
}

std::vector<double> pooled(std::span<const QuadratureSymbol> series) {
    std::vector<double> out;
    out.reserve(2 * series.size());
    for (const auto& s : series) out.push_back(s.x);
    for (const auto& s : series) out.push_back(s.p);
    return out;
}

double mean_photon_number(std::span<const QuadratureSymbol> series) {
    if (series.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& s : series) acc += s.norm2();
    return acc / (4.0 * static_cast<double>(series.size()));
}

double sample_mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
    if (values.size() < 2) fail(ErrorKind::shape, "variance needs at least two samples");
    const double m = sample_mean(values);
    double acc = 0.0;
    for (double v : values) acc += (v - m) * (v - m);
    return acc / static_cast<double>(values.size() - 1);
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> stream) {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * stream.size());
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (auto s : stream) push(s);
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

}  // namespace cvqkd
