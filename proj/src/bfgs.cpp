#include "mvnt/bfgs.hpp"

#include <cmath>
#include <limits>

namespace mvnt {

namespace {

Eigen::VectorXd numerical_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double step_scale) {
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = step_scale * std::max(1.0, std::abs(x[i]));
        xp[i] = x[i] + h;
        const double fp = f(xp);
        xp[i] = x[i] - h;
        const double fm = f(xp);
        xp[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace

BfgsResult minimize_bfgs(const std::function<double(const Eigen::VectorXd&)>& f,
                         const Eigen::VectorXd& x0, const BfgsOptions& opts) {
    const auto n = x0.size();
    constexpr double inf = std::numeric_limits<double>::infinity();

    BfgsResult res;
    res.x = x0;
    res.f = f(x0);
    if (!std::isfinite(res.f)) {
        res.grad = Eigen::VectorXd::Zero(n);
        return res;  // infeasible start
    }
    res.grad = numerical_gradient(f, res.x, opts.fd_step);

    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);

    for (int iter = 0; iter < opts.max_iterations; ++iter) {
        res.iterations = iter;
        if (res.grad.norm() < opts.grad_tol) {
            res.converged = true;
            return res;
        }

        Eigen::VectorXd dir = -(hinv * res.grad);
        double slope = res.grad.dot(dir);
        if (!(slope < 0.0)) {  // reset a corrupted metric
            hinv.setIdentity();
            dir = -res.grad;
            slope = res.grad.dot(dir);
        }

        // Backtracking Armijo search.
        double step = 1.0;
        double f_new = inf;
        Eigen::VectorXd x_new;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = res.x + step * dir;
            f_new = f(x_new);
            if (std::isfinite(f_new) && f_new <= res.f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) return res;  // stuck; converged stays false unless grad is tiny

        const Eigen::VectorXd g_new = numerical_gradient(f, x_new, opts.fd_step);
        const Eigen::VectorXd s = x_new - res.x;
        const Eigen::VectorXd yv = g_new - res.grad;
        const double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd vmat =
                Eigen::MatrixXd::Identity(n, n) - rho * s * yv.transpose();
            hinv = vmat * hinv * vmat.transpose() + rho * s * s.transpose();
        }

        const double f_prev = res.f;
        res.x = x_new;
        res.f = f_new;
        res.grad = g_new;
        if (std::abs(f_prev - f_new) <= opts.f_tol * std::max(1.0, std::abs(f_prev))) {
            res.converged = res.grad.norm() < opts.grad_tol;
            res.iterations = iter + 1;
            return res;
        }
    }
    res.iterations = opts.max_iterations;
    res.converged = res.grad.norm() < opts.grad_tol;
    return res;
}

}  // namespace mvnt
