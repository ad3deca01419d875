#include <doctest.h>

#include <cmath>

#include "mvnt/errors.hpp"
#include "mvnt/quadrature.hpp"
#include "mvnt/rng.hpp"
#include "mvnt/statistics.hpp"

using namespace mvnt;

TEST_SUITE_BEGIN("quadrature");

TEST_CASE("gauss-hermite rule integrates monomials of exp(-x^2)") {
    const auto [x, w] = gauss_hermite_nodes(20);
    CHECK(std::abs(w.sum() - std::sqrt(M_PI)) < 1e-13);
    double m2 = 0.0, m4 = 0.0;
    for (int i = 0; i < 20; ++i) {
        m2 += w[i] * x[i] * x[i];
        m4 += w[i] * std::pow(x[i], 4);
    }
    CHECK(m2 == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-12));
    CHECK(m4 == doctest::Approx(0.75 * std::sqrt(M_PI)).epsilon(1e-12));
}

TEST_CASE("weights sum to the Gaussian normalization") {
    for (int d : {1, 2, 3})
        for (double gamma : {1.5, 2.0, 3.0}) {
            const QuadratureGrid g = make_grid(d, gamma, 24);
            const double expected = std::pow(M_PI / gamma, 0.5 * d);
            CHECK(std::abs(g.weights.sum() - expected) < 1e-12 * expected);
        }
}

TEST_CASE("constant and squared-norm integrands") {
    for (int d : {1, 2, 3}) {
        const double gamma = 2.0;
        const QuadratureGrid g = make_grid(d, gamma, 30);
        const double norm = std::pow(M_PI / gamma, 0.5 * d);
        CHECK(integrate([](const Eigen::VectorXd&) { return 1.0; }, g) ==
              doctest::Approx(norm).epsilon(1e-13));
        CHECK(integrate([](const Eigen::VectorXd& t) { return t.squaredNorm(); }, g) ==
              doctest::Approx(d / (2.0 * gamma) * norm).epsilon(1e-12));
    }
}

TEST_CASE("cosine of the squared norm matches the closed form") {
    // int cos(t^2) exp(-gamma t^2) dt = sqrt(pi/gamma) cos(atan(1/gamma)/2)
    //                                   / (1 + 1/gamma^2)^(1/4)
    const double gamma = 2.0;
    const QuadratureGrid g = make_grid(1, gamma, 60);
    const double got =
        integrate([](const Eigen::VectorXd& t) { return std::cos(t.squaredNorm()); }, g);
    const double expected = std::sqrt(M_PI / gamma) * std::cos(0.5 * std::atan(1.0 / gamma)) /
                            std::pow(1.0 + 1.0 / (gamma * gamma), 0.25);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("grid refinement leaves U_n integrands stable") {
    RngStream rng(404);
    for (int d : {1, 2}) {
        Eigen::MatrixXd x(12, d);
        for (int i = 0; i < 12; ++i)
            for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
        const ScaledResiduals resid = scaled_residuals(x);
        const double gamma = 1.5;
        const auto integrand = [&](const Eigen::VectorXd& t) {
            const double u = u_process(resid, t);
            return u * u;
        };
        const double coarse = integrate(integrand, make_grid(d, gamma, 40));
        const double fine = integrate(integrand, make_grid(d, gamma, 80));
        CHECK(std::abs(coarse - fine) < 1e-8 * std::abs(fine));
    }
}

TEST_CASE("kernel integrals: garch and iid sigma^2 coincide") {
    for (double gamma : {1.5, 2.0}) {
        const AsymptoticConstants iid = kernel_integrals(gamma, 2, KernelVariant::iid);
        const AsymptoticConstants garch = kernel_integrals(gamma, 2, KernelVariant::garch);
        CHECK(std::abs(iid.sigma2 - garch.sigma2) < 1e-8);
    }
}

TEST_CASE("guards") {
    CHECK_THROWS_AS(make_grid(4, 2.0), DimensionTooLarge);
    CHECK_THROWS_AS(kernel_integrals(2.0, 4, KernelVariant::iid), DimensionTooLarge);
    CHECK_THROWS_AS(kernel_integrals(0.9, 2, KernelVariant::iid), GammaTooSmall);
    const QuadratureGrid g = make_grid(1, 2.0, 10);
    CHECK_THROWS_AS(
        integrate([](const Eigen::VectorXd& t) { return std::log(-t.cwiseAbs()[0]); }, g),
        NonFinite);
}

TEST_SUITE_END();
