#pragma once

// Minimal Gaussian-state toolkit in SNU (vacuum covariance = identity),
// quadrature ordering x1, p1, x2, p2, ...

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace cvqkd {

class CovarianceMatrix {
public:
    CovarianceMatrix() = default;
    explicit CovarianceMatrix(Eigen::MatrixXd entries);

    static CovarianceMatrix vacuum(std::size_t modes);
    static CovarianceMatrix thermal(double v);
    // Pure two-mode squeezed vacuum with local variance v >= 1.
    static CovarianceMatrix two_mode_squeezed(double v);

    std::size_t modes() const noexcept { return static_cast<std::size_t>(m_.rows() / 2); }
    const Eigen::MatrixXd& entries() const noexcept { return m_; }
    bool is_symmetric(double tol = 1e-12) const;

    CovarianceMatrix direct_sum(const CovarianceMatrix& other) const;
    CovarianceMatrix select_modes(std::span<const std::size_t> modes) const;

    // Beam splitter of power transmittance t between modes a and b:
    // a' = sqrt(t) a + sqrt(1-t) b, b' = -sqrt(1-t) a + sqrt(t) b.
    CovarianceMatrix beam_splitter(std::size_t a, std::size_t b, double t) const;

    // Conditions on ideal homodyne outcomes of the listed quadrature indices
    // and returns the covariance of keep_modes (which must not overlap the
    // measured modes).
    CovarianceMatrix condition_on_homodyne(std::span<const std::size_t> measured_quadratures,
                                           std::span<const std::size_t> keep_modes) const;

private:
    Eigen::MatrixXd m_;
};

// Sorted ascending, one value per mode.
std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& cm);

// Von Neumann entropy in bits, sum of g((nu - 1) / 2).
double von_neumann_entropy(const CovarianceMatrix& cm);

}  // namespace cvqkd
