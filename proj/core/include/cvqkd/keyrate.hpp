#pragma once

// Asymptotic reverse-reconciliation key rate for GMCS with heterodyne
// detection under collective Gaussian attacks.
//
// Excess noise enters as measured at Bob (eps) and is referred to the
// channel input as xi = eps / (eta T) for the Holevo bound. In the default
// trusted-receiver model eta and v_elec are not attributed to the
// eavesdropper.

#include <span>

#include "cvqkd/gaussian_state.hpp"
#include "cvqkd/model.hpp"

namespace cvqkd {

// G(x) = (x + 1) log2(x + 1) - x log2(x), G(0) = 0.
double g_function(double x);

enum class ReceiverTrust { trusted, untrusted };
enum class HolevoMethod { covariance_matrix, closed_form };

struct HolevoOptions {
    ReceiverTrust trust = ReceiverTrust::trusted;
    HolevoMethod method = HolevoMethod::covariance_matrix;
};

// Alice-Bob covariance of the entanglement-based picture after the channel:
// V = v_mod + 1, Bob's local variance T (V - 1) + 1 + T xi.
CovarianceMatrix alice_bob_covariance(double v_mod, double t, double xi);

double holevo_bound(const SystemParams& params, double t, double eps, const HolevoOptions& options = {});

// Both evaluation routes, exposed separately for cross-checking.
double holevo_covariance_matrix(const SystemParams& params, double t, double eps, ReceiverTrust trust);
double holevo_closed_form(const SystemParams& params, double t, double eps, ReceiverTrust trust);

struct KeyRateResult {
    double i_ab = 0.0;     // bits per symbol
    double chi_be = 0.0;   // bits per symbol
    double skr_raw = 0.0;  // bits/s, may be negative
    double skr = 0.0;      // bits/s, clamped at zero
    double r_eff = 0.0;    // Hz
    double beta = 0.0;
};

KeyRateResult secret_key_rate(const SystemParams& params, double t, double eps, const HolevoOptions& options = {});

// Key rate from block estimates: clamps eps at zero and t into (0, 1] before
// evaluating, since raw estimators can land slightly outside the physical
// range.
KeyRateResult secret_key_rate_from_estimates(const SystemParams& params, double t_hat, double eps_hat,
                                             const HolevoOptions& options = {});

// Root of skr_raw(eps) = 0 on [0, 0.5] by bisection to 1e-5 SNU.
double epsilon_threshold(const SystemParams& params, double t, const HolevoOptions& options = {});

// Sum of clamped per-core key rates.
double aggregate_skr(std::span<const KeyRateResult> results);

}  // namespace cvqkd
