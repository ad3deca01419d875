#include "mvnt/quadrature.hpp"

#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mvnt/errors.hpp"

namespace mvnt {

namespace {

// Iterates a full tensor grid without materializing it: calls
// visit(point, weight) for every node of the rule in dim dimensions.
template <typename Visit>
void foreach_tensor_node(int dim, double gamma, int order, Visit&& visit) {
    const auto [x, w] = gauss_hermite_nodes(order);
    const double root = std::sqrt(gamma);

    std::vector<int> idx(dim, 0);
    Eigen::VectorXd point(dim);
    for (;;) {
        double weight = 1.0;
        for (int a = 0; a < dim; ++a) {
            point[a] = x[idx[a]] / root;
            weight *= w[idx[a]] / root;
        }
        visit(point, weight);

        int a = 0;
        while (a < dim && ++idx[a] == order) idx[a++] = 0;
        if (a == dim) break;
    }
}

int default_kernel_order(int dim) {
    if (dim <= 2) return 48;
    if (dim <= 4) return 28;
    return 16;
}

}  // namespace

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_hermite_nodes(int order) {
    if (order < 1) throw BadParameter("quadrature order must be >= 1");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (int i = 1; i < order; ++i) {
        const double off = std::sqrt(0.5 * i);
        jacobi(i, i - 1) = off;
        jacobi(i - 1, i) = off;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    Eigen::VectorXd x = es.eigenvalues();
    Eigen::VectorXd w(order);
    const double mu0 = std::sqrt(M_PI);  // int exp(-x^2) dx
    for (int i = 0; i < order; ++i) {
        const double v0 = es.eigenvectors()(0, i);
        w[i] = mu0 * v0 * v0;
    }
    return {x, w};
}

QuadratureGrid make_grid(int d, double gamma, int order) {
    if (d > 3) throw DimensionTooLarge("quadrature grids are capped at d = 3");
    if (d < 1) throw BadParameter("dimension must be >= 1");
    if (!(gamma > 0.0)) throw BadParameter("gamma must be positive");

    QuadratureGrid g;
    g.order = order;
    g.gamma = gamma;
    g.dim = d;
    const long total = static_cast<long>(std::pow(order, d));
    g.points.resize(total, d);
    g.weights.resize(total);
    long i = 0;
    foreach_tensor_node(d, gamma, order, [&](const Eigen::VectorXd& p, double w) {
        g.points.row(i) = p;
        g.weights[i] = w;
        ++i;
    });
    return g;
}

double integrate(const std::function<double(const Eigen::VectorXd&)>& f,
                 const QuadratureGrid& grid) {
    double acc = 0.0, comp = 0.0;
    for (Eigen::Index i = 0; i < grid.weights.size(); ++i) {
        const double fv = f(grid.points.row(i));
        if (!std::isfinite(fv)) throw NonFinite("integrand is not finite at a node");
        const double v = grid.weights[i] * fv;
        const double t = acc + v;
        comp += std::abs(acc) >= std::abs(v) ? (acc - t) + v : (v - t) + acc;
        acc = t;
    }
    return acc + comp;
}

AsymptoticConstants kernel_integrals(double gamma, int d, KernelVariant variant, int order) {
    if (d > 3) throw DimensionTooLarge("kernel integrals are capped at d = 3");
    if (!(gamma > 1.0)) throw GammaTooSmall("kernel integrals require gamma > 1");

    AsymptoticConstants out;

    const int order2 = order > 0 ? order : default_kernel_order(2 * d);
    double acc = 0.0;
    foreach_tensor_node(2 * d, gamma, order2, [&](const Eigen::VectorXd& p, double w) {
        acc += w * kernel_c(p.head(d), p.tail(d), variant);
    });
    out.sigma2 = acc;

    const int order1 = order > 0 ? order : default_kernel_order(d);
    acc = 0.0;
    foreach_tensor_node(d, gamma, order1, [&](const Eigen::VectorXd& p, double w) {
        acc += w * kernel_c(p, p, variant);
    });
    out.mean_w_norm = acc;
    return out;
}

}  // namespace mvnt
