#include "cvqkd/estimation.hpp"

#include <algorithm>
#include <cmath>

namespace cvqkd {

namespace {

void check_pair(std::span<const QuadratureSymbol> q_a, std::span<const QuadratureSymbol> q_b) {
    if (q_a.size() != q_b.size()) fail(ErrorKind::shape, "Alice and Bob series differ in length");
    if (q_a.empty()) fail(ErrorKind::shape, "empty block");
}

}  // namespace

double conditional_variance(std::span<const QuadratureSymbol> q_a, std::span<const QuadratureSymbol> q_b,
                            double eta, double t) {
    check_pair(q_a, q_b);
    if (!(eta > 0.0) || !(t >= 0.0)) fail(ErrorKind::domain, "eta must be > 0 and t >= 0");
    const double k = std::sqrt(eta * t / 2.0);
    std::vector<double> residual;
    residual.reserve(2 * q_a.size());
    for (std::size_t i = 0; i < q_a.size(); ++i) residual.push_back(k * q_a[i].x - q_b[i].x);
    for (std::size_t i = 0; i < q_a.size(); ++i) residual.push_back(k * q_a[i].p - q_b[i].p);
    return sample_variance(residual);
}

double estimate_transmittance(std::span<const QuadratureSymbol> q_a, std::span<const QuadratureSymbol> q_b,
                              double eta, double v_mod) {
    check_pair(q_a, q_b);
    if (!(v_mod > 0.0)) fail(ErrorKind::domain, "v_mod must be > 0");
    if (!(eta > 0.0)) fail(ErrorKind::domain, "eta must be > 0");
    double acc = 0.0;
    for (std::size_t i = 0; i < q_a.size(); ++i) acc += q_a[i].x * q_b[i].x + q_a[i].p * q_b[i].p;
    const double inner = acc / (2.0 * static_cast<double>(q_a.size()));
    const double r = inner / v_mod;
    return (2.0 / eta) * r * r;
}

double estimate_excess_noise(double v_b_given_a, double v_elec) {
    return 2.0 * (v_b_given_a - 1.0 - v_elec);
}

double mutual_information(const SystemParams& params, double t, double eps) {
    const double snr = params.eta * t * params.v_mod / (2.0 + eps + 2.0 * params.v_elec);
    return std::log2(1.0 + snr);
}

double predicted_bob_variance(const SystemParams& params, double t, double eps) {
    return (params.eta * t * params.v_mod + eps) / 2.0 + params.v_elec + 1.0;
}

BobVarianceCheck bob_variance_check(std::span<const QuadratureSymbol> q_b, const SystemParams& params, double t,
                                    double eps) {
    BobVarianceCheck check;
    const auto values = pooled(q_b);
    check.measured = sample_variance(values);
    check.predicted = predicted_bob_variance(params, t, eps);
    check.standard_error = check.predicted * std::sqrt(2.0 / static_cast<double>(values.size() - 1));
    check.pass = std::abs(check.measured - check.predicted) <= 3.0 * check.standard_error;
    return check;
}

BlockEstimate estimate_block(std::span<const QuadratureSymbol> q_a, std::span<const QuadratureSymbol> q_b,
                             const SystemParams& params, double v_elec_calibrated, int core_id) {
    BlockEstimate est;
    est.core_id = core_id;
    est.n_symbols = q_a.size();
    est.t_hat = estimate_transmittance(q_a, q_b, params.eta, params.v_mod);
    est.v_b_given_a = conditional_variance(q_a, q_b, params.eta, est.t_hat);
    est.eps = estimate_excess_noise(est.v_b_given_a, v_elec_calibrated);
    est.v_b = sample_variance(pooled(q_b));

    SystemParams measured = params;
    measured.v_elec = v_elec_calibrated;
    est.i_ab = mutual_information(measured, est.t_hat, std::max(est.eps, 0.0));
    return est;
}

}  // namespace cvqkd
