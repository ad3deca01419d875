#include "mvnt/standardize.hpp"

#include <Eigen/Eigenvalues>

#include "mvnt/errors.hpp"

namespace mvnt {

Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& m, double eig_tol_rel) {
    if (m.rows() != m.cols()) throw NotSpd("matrix is not square");
    const double scale = m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, scale))
        throw NotSpd("matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) throw NotSpd("eigendecomposition failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double tol = eig_tol_rel * ev.cwiseAbs().maxCoeff();
    if (ev.minCoeff() <= tol)
        throw NotSpd("matrix has an eigenvalue at or below the tolerance");

    const Eigen::VectorXd inv_sqrt_ev = ev.array().rsqrt();
    return es.eigenvectors() * inv_sqrt_ev.asDiagonal() * es.eigenvectors().transpose();
}

Standardization standardize(const DataMatrix& x) {
    const auto n = x.rows();
    const auto d = x.cols();
    if (n < d + 1) throw TooFewRows("need at least d+1 observations");
    if (!x.allFinite()) throw DataError("data contains non-finite values");

    Standardization s;
    s.mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - s.mean.transpose();
    s.cov = (centered.transpose() * centered) / static_cast<double>(n);
    try {
        s.inv_sqrt = sym_inv_sqrt(s.cov);
    } catch (const NotSpd&) {
        throw SingularCovariance("sample covariance is singular or indefinite");
    }
    return s;
}

ScaledResiduals scaled_residuals(const DataMatrix& x, bool with_gram) {
    const Standardization s = standardize(x);
    const Eigen::MatrixXd centered = x.rowwise() - s.mean.transpose();
    return residual_cache(centered * s.inv_sqrt, with_gram);
}

ScaledResiduals residual_cache(const Eigen::MatrixXd& rows, bool with_gram) {
    ScaledResiduals r;
    r.y = rows;
    r.sq_norms = rows.rowwise().squaredNorm();
    if (with_gram) r.gram = rows * rows.transpose();
    return r;
}

}  // namespace mvnt
