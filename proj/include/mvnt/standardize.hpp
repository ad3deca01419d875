#pragma once

#include <Eigen/Dense>

namespace mvnt {

/// Observation matrix: one observation per row, n x d.
using DataMatrix = Eigen::MatrixXd;

/// Sample mean, covariance (divisor n, not n-1) and its symmetric inverse
/// square root. Every table reproduction depends on the divisor-n convention.
struct Standardization {
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::MatrixXd inv_sqrt;
};

/// Scaled residuals Y_j = S^{-1/2}(X_j - mean) with cached squared norms and
/// the Gram matrix of pairwise inner products. Everything downstream of
/// standardization is a function of the Gram matrix alone, which is what
/// makes the statistics affine invariant. Immutable after construction.
struct ScaledResiduals {
    Eigen::MatrixXd y;         // n x d, rows are residuals
    Eigen::VectorXd sq_norms;  // ||Y_j||^2
    Eigen::MatrixXd gram;      // Y_i . Y_j; empty when built without it

    int n() const { return static_cast<int>(y.rows()); }
    int d() const { return static_cast<int>(y.cols()); }
    bool has_gram() const { return gram.size() > 0; }
};

/// Unique symmetric inverse square root of an SPD matrix, r m r = I.
/// Throws NotSpd if m is asymmetric beyond 1e-10 or has an eigenvalue at or
/// below eig_tol_rel times the largest one. Near-singularity signals bad
/// input here, not a case to repair by clipping.
Eigen::MatrixXd sym_inv_sqrt(const Eigen::MatrixXd& m, double eig_tol_rel = 1e-12);

/// Mean, covariance (divisor n) and S^{-1/2} of the sample.
/// Throws TooFewRows if n < d+1, SingularCovariance if S is singular.
Standardization standardize(const DataMatrix& x);

/// Scaled residuals of the sample. with_gram controls whether the n x n Gram
/// matrix is materialized (all closed-form statistics need it).
ScaledResiduals scaled_residuals(const DataMatrix& x, bool with_gram = true);

/// Residual cache for rows that are already centered/standardized by the
/// model (GARCH innovations, synthetic residual sets): no re-centering, no
/// re-scaling, just the norm/Gram caches the statistic kernels read.
ScaledResiduals residual_cache(const Eigen::MatrixXd& rows, bool with_gram = true);

}  // namespace mvnt
