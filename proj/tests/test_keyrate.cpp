#include <gtest/gtest.h>

#include <cmath>

#include "cvqkd/keyrate.hpp"
#include "oracles.hpp"

using namespace cvqkd;

namespace {

const std::vector<double> kTGrid = {0.05, 0.2, 0.45, 0.673, 0.85, 1.0};
const std::vector<double> kEpsGrid = {0.0, 0.005, 0.0118, 0.02, 0.045, 0.1};

}  // namespace

TEST(Keyrate, GFunction) {
    EXPECT_NEAR(g_function(0.5), 1.37744, 1e-5);
    EXPECT_EQ(g_function(0.0), 0.0);
    EXPECT_EQ(g_function(-1e-12), 0.0);
    EXPECT_THROW(g_function(-0.1), Error);
    for (double x : {0.01, 0.3, 2.0, 40.0}) EXPECT_NEAR(g_function(x), oracle::g(x), 1e-13);
}

TEST(Keyrate, RoutesAgreeOnGrid) {
    for (auto trust : {ReceiverTrust::trusted, ReceiverTrust::untrusted})
        for (double eta : {0.18, 0.6, 1.0})
            for (double v_elec : {0.0, 0.021, 0.1})
                for (double t : kTGrid)
                    for (double eps : kEpsGrid) {
                        SystemParams p;
                        p.eta = eta;
                        p.v_elec = v_elec;
                        EXPECT_NEAR(holevo_covariance_matrix(p, t, eps, trust), holevo_closed_form(p, t, eps, trust),
                                    1e-6)
                            << "eta=" << eta << " v_elec=" << v_elec << " t=" << t << " eps=" << eps;
                    }
}

TEST(Keyrate, IdealReceiverMatchesTextbookHeterodyneBound) {
    SystemParams p;
    p.eta = 1.0;
    p.v_elec = 0.0;
    for (double t : kTGrid)
        for (double eps : kEpsGrid) {
            const double expected = oracle::holevo_ideal_heterodyne(p.v_mod, t, eps / t);
            EXPECT_NEAR(holevo_covariance_matrix(p, t, eps, ReceiverTrust::trusted), expected, 1e-9);
            EXPECT_NEAR(holevo_closed_form(p, t, eps, ReceiverTrust::untrusted), expected, 1e-9);
        }
}

TEST(Keyrate, HolevoNonNegativeAndSkrMonotone) {
    const SystemParams p;
    for (auto trust : {ReceiverTrust::trusted, ReceiverTrust::untrusted}) {
        const HolevoOptions opts{trust, HolevoMethod::covariance_matrix};
        for (double t : kTGrid) {
            double prev = std::numeric_limits<double>::infinity();
            for (double eps : kEpsGrid) {
                const auto r = secret_key_rate(p, t, eps, opts);
                EXPECT_GE(r.chi_be, 0.0);
                EXPECT_LE(r.skr_raw, prev + 1e-6) << "t=" << t << " eps=" << eps;
                prev = r.skr_raw;
            }
        }
        for (double eps : kEpsGrid) {
            double prev = -std::numeric_limits<double>::infinity();
            for (double t : kTGrid) {
                const auto r = secret_key_rate(p, t, eps, opts);
                EXPECT_GE(r.skr_raw, prev - 1e-6) << "t=" << t << " eps=" << eps;
                prev = r.skr_raw;
            }
        }
    }
}

TEST(Keyrate, UntrustedReceiverIsMorePessimistic) {
    const SystemParams p;
    for (double t : kTGrid)
        for (double eps : kEpsGrid)
            EXPECT_GE(holevo_bound(p, t, eps, {ReceiverTrust::untrusted}),
                      holevo_bound(p, t, eps, {ReceiverTrust::trusted}) - 1e-9);
}

TEST(Keyrate, KeyRateComposition) {
    const SystemParams p;
    const auto r = secret_key_rate(p, 0.673, 0.0118);
    EXPECT_DOUBLE_EQ(r.r_eff, 15.625e6);
    EXPECT_DOUBLE_EQ(r.beta, 0.95);
    EXPECT_NEAR(r.skr_raw, (0.95 * r.i_ab - r.chi_be) * 15.625e6, 1e-6);
    EXPECT_EQ(r.skr, std::max(0.0, r.skr_raw));
    const auto bad = secret_key_rate(p, 0.673, 0.3);
    EXPECT_LT(bad.skr_raw, 0.0);
    EXPECT_EQ(bad.skr, 0.0);
}

TEST(Keyrate, EstimatesAreClamped) {
    const SystemParams p;
    const auto neg = secret_key_rate_from_estimates(p, 0.673, -0.004);
    const auto zero = secret_key_rate(p, 0.673, 0.0);
    EXPECT_DOUBLE_EQ(neg.skr_raw, zero.skr_raw);
    const auto high = secret_key_rate_from_estimates(p, 1.02, 0.01);
    EXPECT_DOUBLE_EQ(high.skr_raw, secret_key_rate(p, 1.0, 0.01).skr_raw);
    EXPECT_THROW(secret_key_rate_from_estimates(p, 0.0, 0.01), Error);
    EXPECT_THROW(secret_key_rate_from_estimates(p, std::nan(""), 0.01), Error);
    EXPECT_THROW(secret_key_rate(p, 0.673, -0.01), Error);
    EXPECT_THROW(secret_key_rate(p, 1.2, 0.01), Error);
}

TEST(Keyrate, ThresholdIsRootOfRawRate) {
    const SystemParams p;
    const double eps0 = epsilon_threshold(p, 0.673);
    EXPECT_GT(secret_key_rate(p, 0.673, eps0 - 1e-4).skr_raw, 0.0);
    EXPECT_LT(secret_key_rate(p, 0.673, eps0 + 1e-4).skr_raw, 0.0);
    // Lower transmittance tolerates less excess noise.
    EXPECT_LT(epsilon_threshold(p, 0.3), eps0);
    SystemParams weak = p;
    weak.beta = 0.2;
    try {
        epsilon_threshold(weak, 0.673);
        FAIL() << "expected no_threshold";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::no_threshold);
    }
}

TEST(Keyrate, AggregateSumsClampedRates) {
    std::vector<KeyRateResult> rs(3);
    rs[0].skr = 1.0;
    rs[1].skr = 2.5;
    rs[2].skr = 0.0;
    EXPECT_DOUBLE_EQ(aggregate_skr(rs), 3.5);
    EXPECT_DOUBLE_EQ(aggregate_skr({}), 0.0);
}
