#include "cvqkd/gaussian_state.hpp"

#include <algorithm>
#include <cmath>

#include "cvqkd/error.hpp"
#include "cvqkd/keyrate.hpp"

namespace cvqkd {

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd entries) : m_(std::move(entries)) {
    if (m_.rows() != m_.cols() || m_.rows() % 2 != 0)
        fail(ErrorKind::shape, "covariance matrix must be square with even dimension");
}

CovarianceMatrix CovarianceMatrix::vacuum(std::size_t modes) {
    const auto n = static_cast<Eigen::Index>(2 * modes);
    return CovarianceMatrix(Eigen::MatrixXd::Identity(n, n));
}

CovarianceMatrix CovarianceMatrix::thermal(double v) {
    return CovarianceMatrix(v * Eigen::MatrixXd::Identity(2, 2));
}

CovarianceMatrix CovarianceMatrix::two_mode_squeezed(double v) {
    if (!(v >= 1.0)) fail(ErrorKind::domain, "two-mode squeezed variance must be >= 1");
    const double c = std::sqrt(v * v - 1.0);
    Eigen::MatrixXd m = v * Eigen::MatrixXd::Identity(4, 4);
    m(0, 2) = m(2, 0) = c;
    m(1, 3) = m(3, 1) = -c;
    return CovarianceMatrix(std::move(m));
}

bool CovarianceMatrix::is_symmetric(double tol) const {
    return (m_ - m_.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, m_.cwiseAbs().maxCoeff());
}

CovarianceMatrix CovarianceMatrix::direct_sum(const CovarianceMatrix& other) const {
    const auto a = m_.rows();
    const auto b = other.m_.rows();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a + b, a + b);
    m.topLeftCorner(a, a) = m_;
    m.bottomRightCorner(b, b) = other.m_;
    return CovarianceMatrix(std::move(m));
}

CovarianceMatrix CovarianceMatrix::select_modes(std::span<const std::size_t> modes) const {
    std::vector<Eigen::Index> idx;
    for (auto k : modes) {
        if (k >= this->modes()) fail(ErrorKind::shape, "mode index out of range");
        idx.push_back(static_cast<Eigen::Index>(2 * k));
        idx.push_back(static_cast<Eigen::Index>(2 * k + 1));
    }
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = m_(idx[i], idx[j]);
    return CovarianceMatrix(std::move(m));
}

CovarianceMatrix CovarianceMatrix::beam_splitter(std::size_t a, std::size_t b, double t) const {
    if (a >= modes() || b >= modes() || a == b) fail(ErrorKind::shape, "invalid beam splitter modes");
    if (!(t >= 0.0 && t <= 1.0)) fail(ErrorKind::domain, "beam splitter transmittance must lie in [0, 1]");
    const double st = std::sqrt(t);
    const double sr = std::sqrt(1.0 - t);
    Eigen::MatrixXd s = Eigen::MatrixXd::Identity(m_.rows(), m_.cols());
    for (int q = 0; q < 2; ++q) {
        const auto ia = static_cast<Eigen::Index>(2 * a + q);
        const auto ib = static_cast<Eigen::Index>(2 * b + q);
        s(ia, ia) = st;
        s(ia, ib) = sr;
        s(ib, ia) = -sr;
        s(ib, ib) = st;
    }
    return CovarianceMatrix(s * m_ * s.transpose());
}

CovarianceMatrix CovarianceMatrix::condition_on_homodyne(std::span<const std::size_t> measured_quadratures,
                                                         std::span<const std::size_t> keep_modes) const {
    std::vector<Eigen::Index> keep;
    for (auto k : keep_modes) {
        keep.push_back(static_cast<Eigen::Index>(2 * k));
        keep.push_back(static_cast<Eigen::Index>(2 * k + 1));
    }
    for (auto q : measured_quadratures)
        if (std::find(keep_modes.begin(), keep_modes.end(), q / 2) != keep_modes.end())
            fail(ErrorKind::shape, "a kept mode cannot also be measured");

    const auto nk = static_cast<Eigen::Index>(keep.size());
    const auto nm = static_cast<Eigen::Index>(measured_quadratures.size());
    Eigen::MatrixXd a(nk, nk), c(nk, nm), b(nm, nm);
    for (Eigen::Index i = 0; i < nk; ++i) {
        for (Eigen::Index j = 0; j < nk; ++j) a(i, j) = m_(keep[i], keep[j]);
        for (Eigen::Index j = 0; j < nm; ++j) c(i, j) = m_(keep[i], static_cast<Eigen::Index>(measured_quadratures[j]));
    }
    for (Eigen::Index i = 0; i < nm; ++i)
        for (Eigen::Index j = 0; j < nm; ++j)
            b(i, j) = m_(static_cast<Eigen::Index>(measured_quadratures[i]),
                         static_cast<Eigen::Index>(measured_quadratures[j]));

    Eigen::MatrixXd cond = a - c * b.ldlt().solve(c.transpose());
    return CovarianceMatrix(0.5 * (cond + cond.transpose()));
}

std::vector<double> symplectic_eigenvalues(const CovarianceMatrix& cm) {
    if (!cm.is_symmetric(1e-9)) fail(ErrorKind::shape, "covariance matrix is not symmetric");
    const auto& g = cm.entries();
    const auto n = g.rows();

    // gamma^{1/2} (i Omega) gamma^{1/2} is Hermitian with eigenvalues +-nu_k.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (g + g.transpose()));
    if (es.eigenvalues().minCoeff() <= 0.0) fail(ErrorKind::domain, "covariance matrix is not positive definite");
    const Eigen::MatrixXd root = es.operatorSqrt();

    Eigen::MatrixXcd omega = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index k = 0; k < n / 2; ++k) {
        omega(2 * k, 2 * k + 1) = std::complex<double>(0.0, 1.0);
        omega(2 * k + 1, 2 * k) = std::complex<double>(0.0, -1.0);
    }
    const Eigen::MatrixXcd h = root.cast<std::complex<double>>() * omega * root.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> hs(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);

    // Ascending order: the upper half holds the positive partners.
    std::vector<double> nu;
    for (Eigen::Index k = n / 2; k < n; ++k) nu.push_back(hs.eigenvalues()(k));
    std::sort(nu.begin(), nu.end());
    return nu;
}

double von_neumann_entropy(const CovarianceMatrix& cm) {
    double s = 0.0;
    for (double nu : symplectic_eigenvalues(cm)) s += g_function((nu - 1.0) / 2.0);
    return s;
}

}  // namespace cvqkd
