#pragma once

#include <functional>

#include <Eigen/Dense>

namespace mvnt {

struct BfgsOptions {
    int max_iterations = 500;
    double grad_tol = 1e-6;     // sup over L2 norm of the numerical gradient
    double fd_step = 1e-5;      // central-difference step scale
    double f_tol = 1e-12;       // relative objective stagnation
};

struct BfgsResult {
    Eigen::VectorXd x;
    double f = 0.0;
    Eigen::VectorXd grad;
    int iterations = 0;
    bool converged = false;
};

/// Quasi-Newton minimizer with numerical central-difference gradients and a
/// backtracking Armijo line search. Unconstrained; callers handle constraints
/// by smooth reparameterization. The objective may return +inf to reject a
/// region; the line search backs off.
BfgsResult minimize_bfgs(const std::function<double(const Eigen::VectorXd&)>& f,
                         const Eigen::VectorXd& x0, const BfgsOptions& opts = {});

}  // namespace mvnt
