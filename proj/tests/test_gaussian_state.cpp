#include <gtest/gtest.h>

#include <cmath>

#include "cvqkd/gaussian_state.hpp"
#include "cvqkd/keyrate.hpp"
#include "oracles.hpp"

using namespace cvqkd;

TEST(GaussianState, VacuumAndThermalEntropy) {
    EXPECT_NEAR(von_neumann_entropy(CovarianceMatrix::vacuum(3)), 0.0, 1e-12);
    for (double v : {1.5, 2.764, 10.0}) {
        const auto ev = symplectic_eigenvalues(CovarianceMatrix::thermal(v));
        ASSERT_EQ(ev.size(), 1u);
        EXPECT_NEAR(ev[0], v, 1e-12);
        EXPECT_NEAR(von_neumann_entropy(CovarianceMatrix::thermal(v)), oracle::g((v - 1.0) / 2.0), 1e-12);
    }
}

TEST(GaussianState, PureTwoModeSqueezedEigenvaluesAreOne) {
    // Beyond v ~ 1e3 the rounding of c = sqrt(v^2 - 1) alone moves the
    // eigenvalues by more than 1e-9.
    for (double v : {1.0, 1.001, 2.764, 50.0, 1e3}) {
        const auto ev = symplectic_eigenvalues(CovarianceMatrix::two_mode_squeezed(v));
        ASSERT_EQ(ev.size(), 2u);
        EXPECT_NEAR(ev[0], 1.0, 1e-9) << "v=" << v;
        EXPECT_NEAR(ev[1], 1.0, 1e-9) << "v=" << v;
    }
}

TEST(GaussianState, TwoModeEigenvaluesMatchInvariantFormula) {
    for (double v_mod : {0.5, 1.764, 5.0})
        for (double t : {0.1, 0.673, 0.95})
            for (double xi : {0.0, 0.05, 0.3}) {
                const double v = v_mod + 1.0;
                const double b = t * (v - 1.0) + 1.0 + t * xi;
                const double c = std::sqrt(t * (v * v - 1.0));
                const auto expected = oracle::two_mode_eigenvalues(v, b, c);
                const auto ev = symplectic_eigenvalues(alice_bob_covariance(v_mod, t, xi));
                EXPECT_NEAR(ev[0], expected.nu_minus, 1e-10);
                EXPECT_NEAR(ev[1], expected.nu_plus, 1e-10);
            }
}

TEST(GaussianState, BeamSplitterPreservesSpectrum) {
    const auto state = alice_bob_covariance(1.764, 0.673, 0.02).direct_sum(CovarianceMatrix::thermal(3.0));
    const auto before = symplectic_eigenvalues(state);
    const auto after = symplectic_eigenvalues(state.beam_splitter(1, 2, 0.3));
    ASSERT_EQ(before.size(), after.size());
    for (std::size_t i = 0; i < before.size(); ++i) EXPECT_NEAR(before[i], after[i], 1e-10);
}

TEST(GaussianState, BeamSplitterMixesVariances) {
    const auto state = CovarianceMatrix::thermal(5.0).direct_sum(CovarianceMatrix::vacuum(1)).beam_splitter(0, 1, 0.25);
    EXPECT_NEAR(state.entries()(0, 0), 0.25 * 5.0 + 0.75, 1e-12);
    EXPECT_NEAR(state.entries()(2, 2), 0.75 * 5.0 + 0.25, 1e-12);
}

TEST(GaussianState, HomodyneConditioningMatchesSchurComplement) {
    const double v = 3.0;
    const auto tmsv = CovarianceMatrix::two_mode_squeezed(v);
    const std::array<std::size_t, 1> measured = {2};  // x of mode 1
    const std::array<std::size_t, 1> keep = {0};
    const auto cond = tmsv.condition_on_homodyne(measured, keep);
    const double c2 = v * v - 1.0;
    EXPECT_NEAR(cond.entries()(0, 0), v - c2 / v, 1e-12);
    EXPECT_NEAR(cond.entries()(1, 1), v, 1e-12);
    const std::array<std::size_t, 1> overlapping = {1};
    EXPECT_THROW(tmsv.condition_on_homodyne(measured, overlapping), Error);
}

TEST(GaussianState, SelectAndDirectSum) {
    const auto s = CovarianceMatrix::thermal(2.0).direct_sum(CovarianceMatrix::thermal(3.0));
    EXPECT_EQ(s.modes(), 2u);
    const std::array<std::size_t, 1> second = {1};
    EXPECT_NEAR(s.select_modes(second).entries()(0, 0), 3.0, 1e-15);
}

TEST(GaussianState, RejectsInvalidMatrices) {
    Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(2, 2);
    asym(0, 1) = 0.5;
    EXPECT_THROW(symplectic_eigenvalues(CovarianceMatrix(asym)), Error);
    Eigen::MatrixXd neg = -Eigen::MatrixXd::Identity(2, 2);
    EXPECT_THROW(symplectic_eigenvalues(CovarianceMatrix(neg)), Error);
    EXPECT_THROW(CovarianceMatrix(Eigen::MatrixXd::Identity(3, 3)), Error);
    EXPECT_THROW(CovarianceMatrix::two_mode_squeezed(0.5), Error);
}
