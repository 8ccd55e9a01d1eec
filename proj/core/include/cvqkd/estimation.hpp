#pragma once

// Per-block parameter estimation. Both quadratures are pooled into one
// population of 2N values everywhere in this module.

#include <cstddef>
#include <span>

#include "cvqkd/model.hpp"

namespace cvqkd {

struct BlockEstimate {
    std::size_t n_symbols = 0;
    double eps = 0.0;          // excess noise at Bob, SNU
    double t_hat = 0.0;        // channel transmittance
    double v_b_given_a = 0.0;  // SNU
    double i_ab = 0.0;         // bits per symbol
    double v_b = 0.0;          // Bob's pooled variance, SNU
    int core_id = 0;
};

// var(sqrt(eta t / 2) q_A - q_B), unbiased.
double conditional_variance(std::span<const QuadratureSymbol> q_a, std::span<const QuadratureSymbol> q_b,
                            double eta, double t);

// (2 / eta) (<q_A q_B> / v_mod)^2 with <.> the mean over the pooled population.
double estimate_transmittance(std::span<const QuadratureSymbol> q_a, std::span<const QuadratureSymbol> q_b,
                              double eta, double v_mod);

// 2 (V_B|A - 1 - v_elec). Sampling noise can make it slightly negative; the
// value is returned as is.
double estimate_excess_noise(double v_b_given_a, double v_elec);

// log2(1 + eta t v_mod / (2 + eps + 2 v_elec)).
double mutual_information(const SystemParams& params, double t, double eps);

// (eta t v_mod + eps) / 2 + v_elec + 1.
double predicted_bob_variance(const SystemParams& params, double t, double eps);

struct BobVarianceCheck {
    bool pass = false;
    double measured = 0.0;
    double predicted = 0.0;
    double standard_error = 0.0;
};

// Compares Bob's pooled sample variance with the model value; pass when
// within three standard errors of a Gaussian variance estimate.
BobVarianceCheck bob_variance_check(std::span<const QuadratureSymbol> q_b, const SystemParams& params, double t,
                                    double eps);

// Transmittance, conditional variance, excess noise and mutual information
// for one synchronized, phase-recovered block. v_elec is the calibrated value
// (params.v_elec is ignored), v_mod is Alice's accounting value.
BlockEstimate estimate_block(std::span<const QuadratureSymbol> q_a, std::span<const QuadratureSymbol> q_b,
                             const SystemParams& params, double v_elec_calibrated, int core_id = 0);

}  // namespace cvqkd
