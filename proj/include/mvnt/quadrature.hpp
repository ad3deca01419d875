#pragma once

#include <functional>

#include <Eigen/Dense>

#include "mvnt/statistics.hpp"

namespace mvnt {

/// Tensor-product Gauss-Hermite grid for integrals against exp(-gamma ||t||^2),
/// after the change of variables t = u / sqrt(gamma). Weights sum to
/// (pi/gamma)^{d/2} exactly up to solver precision.
struct QuadratureGrid {
    Eigen::MatrixXd points;   // N x d
    Eigen::VectorXd weights;  // N
    int order = 0;            // nodes per axis
    double gamma = 0.0;
    int dim = 0;
};

/// Nodes and weights of the order-n Gauss-Hermite rule (weight exp(-x^2)),
/// via Golub-Welsch on the Jacobi matrix.
std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite_nodes(int order);

/// Builds the tensor grid. Throws DimensionTooLarge for d > 3: the oracle
/// exists for validation, production paths use closed forms for all d.
QuadratureGrid make_grid(int d, double gamma, int order = 40);

/// Sum of w_i f(t_i), approximating the integral of f against w_gamma.
/// Exact for polynomials of per-axis degree <= 2 order - 1. Throws NonFinite
/// if f produces NaN/Inf at a node.
double integrate(const std::function<double(const Eigen::VectorXd&)>& f,
                 const QuadratureGrid& grid);

/// sigma^2 by 2d-dimensional tensor quadrature of C(s,t) w(s) w(t) and
/// E||W||^2 by d-dimensional quadrature of C(t,t) w(t) — the independent
/// cross-check of the closed forms. order = 0 picks a per-dimension default.
AsymptoticConstants kernel_integrals(double gamma, int d, KernelVariant variant,
                                     int order = 0);

}  // namespace mvnt
