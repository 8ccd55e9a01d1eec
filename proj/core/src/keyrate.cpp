#include "cvqkd/keyrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "cvqkd/estimation.hpp"

namespace cvqkd {

double g_function(double x) {
    if (x < -1e-9 || std::isnan(x)) fail(ErrorKind::domain, "G(x) needs x >= 0");
    if (x <= 0.0) return 0.0;
    return (x + 1.0) * std::log2(x + 1.0) - x * std::log2(x);
}

namespace {

// Channel and detector seen by the bound after resolving which parts of the
// receiver are trusted.
struct EffectiveLink {
    double v;       // V = v_mod + 1
    double t;       // channel transmittance
    double xi;      // input-referred excess noise
    double eta;     // trusted detection efficiency
    double v_elec;  // trusted electronic noise per measured quadrature
};

EffectiveLink resolve(const SystemParams& params, double t, double eps, ReceiverTrust trust) {
    if (!(t > 0.0 && t <= 1.0)) fail(ErrorKind::domain, "transmittance must lie in (0, 1]");
    if (eps < -1e-9 || std::isnan(eps)) fail(ErrorKind::domain, "excess noise must be >= 0");
    eps = std::max(eps, 0.0);
    if (!(params.eta > 0.0 && params.eta <= 1.0)) fail(ErrorKind::domain, "eta must lie in (0, 1]");

    const double v = params.v_mod + 1.0;
    if (trust == ReceiverTrust::trusted) return {v, t, eps / (params.eta * t), params.eta, params.v_elec};

    // Untrusted: the whole receiver belongs to the channel. Bob's measured
    // variance eta T (v_mod + xi)/2 + 1 + v_elec is rewritten as a lossy
    // channel of transmittance eta T feeding an ideal heterodyne detector.
    const double tu = params.eta * t;
    return {v, tu, (eps + 2.0 * params.v_elec) / tu, 1.0, 0.0};
}

}  // namespace

CovarianceMatrix alice_bob_covariance(double v_mod, double t, double xi) {
    const double v = v_mod + 1.0;
    const double a = v;
    const double b = t * (v - 1.0) + 1.0 + t * xi;
    const double c = std::sqrt(t * (v * v - 1.0));
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    m(0, 0) = m(1, 1) = a;
    m(2, 2) = m(3, 3) = b;
    m(0, 2) = m(2, 0) = c;
    m(1, 3) = m(3, 1) = -c;
    return CovarianceMatrix(std::move(m));
}

double holevo_covariance_matrix(const SystemParams& params, double t, double eps, ReceiverTrust trust) {
    const auto link = resolve(params, t, eps, trust);

    // Eve purifies the Alice-Bob state, so S(E) = S(AB).
    const auto ab = alice_bob_covariance(link.v - 1.0, link.t, link.xi);
    const double s_e = von_neumann_entropy(ab);

    // Modes: 0 A, 1 B, 2 F (vacuum into the efficiency beam splitter),
    // 3 H (thermal state on the heterodyne's second port, carrying the
    // electronic noise), 4 G (purification of H).
    constexpr std::size_t A = 0, B = 1, F = 2, H = 3, G = 4;
    const double w = 1.0 + 2.0 * link.v_elec;
    auto full = ab.direct_sum(CovarianceMatrix::vacuum(1)).direct_sum(CovarianceMatrix::two_mode_squeezed(w));
    full = full.beam_splitter(B, F, link.eta);
    full = full.beam_splitter(B, H, 0.5);

    // Heterodyne: x on the first 50:50 output (mode B), p on the second (H).
    const std::array<std::size_t, 2> measured = {2 * B, 2 * H + 1};
    const std::array<std::size_t, 3> keep = {A, F, G};
    const auto cond = full.condition_on_homodyne(measured, keep);

    // The global state is pure, so conditioned on Bob's outcome
    // S(E | m_B) = S(A F G | m_B).
    const double s_e_given_b = von_neumann_entropy(cond);
    return std::max(0.0, s_e - s_e_given_b);
}

double holevo_closed_form(const SystemParams& params, double t, double eps, ReceiverTrust trust) {
    const auto link = resolve(params, t, eps, trust);
    const double v = link.v;
    const double tt = link.t;
    const double chi_line = 1.0 / tt - 1.0 + link.xi;
    const double chi_het = (1.0 + (1.0 - link.eta) + 2.0 * link.v_elec) / link.eta;
    const double chi_tot = chi_line + chi_het / tt;

    const double a = v * v * (1.0 - 2.0 * tt) + 2.0 * tt + tt * tt * (v + chi_line) * (v + chi_line);
    const double b = tt * tt * (v * chi_line + 1.0) * (v * chi_line + 1.0);
    const double disc_ab = std::sqrt(std::max(0.0, a * a - 4.0 * b));
    const double l1 = std::sqrt(0.5 * (a + disc_ab));
    const double l2 = std::sqrt(std::max(0.0, 0.5 * (a - disc_ab)));

    const double sb = std::sqrt(b);
    const double den = tt * (v + chi_tot);
    const double c = (a * chi_het * chi_het + b + 1.0 + 2.0 * chi_het * (v * sb + tt * (v + chi_line)) +
                      2.0 * tt * (v * v - 1.0)) /
                     (den * den);
    const double d = std::pow((v + sb * chi_het) / den, 2);
    const double disc_cd = std::sqrt(std::max(0.0, c * c - 4.0 * d));
    const double l3 = std::sqrt(0.5 * (c + disc_cd));
    const double l4 = std::sqrt(std::max(0.0, 0.5 * (c - disc_cd)));

    auto s = [](double nu) { return g_function(std::max(0.0, (nu - 1.0) / 2.0)); };
    return std::max(0.0, s(l1) + s(l2) - s(l3) - s(l4));
}

double holevo_bound(const SystemParams& params, double t, double eps, const HolevoOptions& options) {
    return options.method == HolevoMethod::closed_form ? holevo_closed_form(params, t, eps, options.trust)
                                                       : holevo_covariance_matrix(params, t, eps, options.trust);
}

KeyRateResult secret_key_rate(const SystemParams& params, double t, double eps, const HolevoOptions& options) {
    KeyRateResult r;
    r.beta = params.beta;
    r.r_eff = params.r_eff();
    r.chi_be = holevo_bound(params, t, eps, options);
    r.i_ab = mutual_information(params, t, std::max(eps, 0.0));
    r.skr_raw = (r.beta * r.i_ab - r.chi_be) * r.r_eff;
    r.skr = std::max(0.0, r.skr_raw);
    return r;
}

KeyRateResult secret_key_rate_from_estimates(const SystemParams& params, double t_hat, double eps_hat,
                                             const HolevoOptions& options) {
    if (!std::isfinite(t_hat) || !std::isfinite(eps_hat)) fail(ErrorKind::domain, "non-finite estimate");
    if (!(t_hat > 0.0)) fail(ErrorKind::domain, "estimated transmittance is zero");
    return secret_key_rate(params, std::min(t_hat, 1.0), std::max(eps_hat, 0.0), options);
}

double epsilon_threshold(const SystemParams& params, double t, const HolevoOptions& options) {
    constexpr double hi_bound = 0.5;
    constexpr double tol = 1e-5;
    auto f = [&](double eps) { return secret_key_rate(params, t, eps, options).skr_raw; };

    double lo = 0.0;
    double hi = hi_bound;
    if (!(f(lo) > 0.0)) fail(ErrorKind::no_threshold, "key rate is not positive at zero excess noise");
    if (!(f(hi) < 0.0)) fail(ErrorKind::no_threshold, "key rate stays positive over the search bracket");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double aggregate_skr(std::span<const KeyRateResult> results) {
    double total = 0.0;
    for (const auto& r : results) total += std::max(0.0, r.skr);
    return total;
}

}  // namespace cvqkd
