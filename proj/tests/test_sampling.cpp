#include <doctest.h>

#include <cmath>

#include "mvnt/errors.hpp"
#include "mvnt/sampling.hpp"
#include "mvnt/standardize.hpp"

using namespace mvnt;

namespace {

// Mardia kurtosis of a sample, via squared norms of the scaled residuals.
double mardia_b2(const DataMatrix& x) {
    const ScaledResiduals r = scaled_residuals(x, /*with_gram=*/false);
    return r.sq_norms.array().square().mean();
}

double coordinate_moment(const DataMatrix& x, int p) {
    return x.array().pow(p).mean();
}

// AEP density of Zhu & Zinde-Walsh, integrated with Simpson's rule: the
// independent oracle for the closed-form moments and the sampler.
double aep_density_moment(int k, double alpha, double p1, double p2) {
    const auto kep = [](double p) {
        return std::pow(p, -1.0 / p) / (2.0 * std::exp(std::lgamma(1.0 + 1.0 / p)));
    };
    const double k1 = kep(p1), k2 = kep(p2);
    const double astar = alpha * k1 / (alpha * k1 + (1.0 - alpha) * k2);
    const auto density = [&](double y) {
        if (y <= 0.0)
            return alpha / astar * k1 *
                   std::exp(-std::pow(-y / (2.0 * astar), p1) / p1);
        return (1.0 - alpha) / (1.0 - astar) * k2 *
               std::exp(-std::pow(y / (2.0 * (1.0 - astar)), p2) / p2);
    };
    const double lo = -50.0, hi = 50.0;
    const int steps = 200000;  // even
    const double h = (hi - lo) / steps;
    double acc = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double y = lo + i * h;
        const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * std::pow(y, k) * density(y);
    }
    return acc * h / 3.0;
}

}  // namespace

TEST_SUITE_BEGIN("sampling");

TEST_CASE("identical stream identity reproduces bit-identical samples") {
    for (const char* name : {"n", "la", "t:5", "gn:1.5", "ase:1.75", "pii:4", "cube", "aep"}) {
        const AlternativeSpec spec = AlternativeSpec::parse(name, 3);
        RngStream a(123456789, 42), b(123456789, 42);
        const DataMatrix xa = sample(spec, 50, a);
        const DataMatrix xb = sample(spec, 50, b);
        CHECK((xa - xb).cwiseAbs().maxCoeff() == 0.0);

        RngStream c(123456789, 43);
        const DataMatrix xc = sample(spec, 50, c);
        CHECK((xc - xa).cwiseAbs().maxCoeff() > 0.0);
    }
}

TEST_CASE("distinct substreams are uncorrelated") {
    RngStream base(2718);
    RngStream s1 = base.child(1), s2 = base.child(2);
    const int n = 100000;
    double sum12 = 0.0, sum1 = 0.0, sum2 = 0.0, sq1 = 0.0, sq2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = s1.normal(), b = s2.normal();
        sum12 += a * b;
        sum1 += a;
        sum2 += b;
        sq1 += a * a;
        sq2 += b * b;
    }
    const double cov = sum12 / n - (sum1 / n) * (sum2 / n);
    const double corr = cov / std::sqrt((sq1 / n - std::pow(sum1 / n, 2)) *
                                        (sq2 / n - std::pow(sum2 / n, 2)));
    CHECK(std::abs(corr) < 0.01);
}

TEST_CASE("laplace sample has identity covariance") {
    RngStream rng(1001);
    const DataMatrix x = sample(AlternativeSpec::laplace(2), 100000, rng);
    const Eigen::RowVectorXd mean = x.colwise().mean();
    const Eigen::MatrixXd centered = x.rowwise() - mean;
    const Eigen::MatrixXd cov = centered.transpose() * centered / x.rows();
    // 3 MC standard errors: var(X^2) = 5 on the diagonal, 2 off it.
    CHECK(std::abs(cov(0, 0) - 1.0) < 3.0 * std::sqrt(5.0 / x.rows()));
    CHECK(std::abs(cov(1, 1) - 1.0) < 3.0 * std::sqrt(5.0 / x.rows()));
    CHECK(std::abs(cov(0, 1)) < 3.0 * std::sqrt(2.0 / x.rows()));
    CHECK(mean.cwiseAbs().maxCoeff() < 3.0 / std::sqrt(static_cast<double>(x.rows())));
}

TEST_CASE("uniform cube keeps its raw scale") {
    RngStream rng(77);
    const DataMatrix x = sample(AlternativeSpec::uniform_cube(3), 100000, rng);
    CHECK(x.minCoeff() >= 0.0);
    CHECK(x.maxCoeff() <= 1.0);
    const double se = std::sqrt(1.0 / 12.0 / x.rows());
    for (int j = 0; j < 3; ++j) CHECK(std::abs(x.col(j).mean() - 0.5) < 3.0 * se);
}

TEST_CASE("multivariate t kurtosis matches the elliptical formula") {
    // b2 -> d(d+2)(nu-2)/(nu-4) = 24 for nu = 5, d = 2.
    RngStream rng(31337);
    const DataMatrix x = sample(AlternativeSpec::multi_t(5.0, 2), 100000, rng);
    const double b2 = mardia_b2(x);
    CHECK(b2 == doctest::Approx(24.0).epsilon(0.15));  // heavy-tailed MC noise

    const Eigen::MatrixXd cov = x.transpose() * x / x.rows();
    CHECK(std::abs(cov(0, 0) - 1.0) < 0.05);  // standardized to unit covariance
}

TEST_CASE("stable elliptical has the sub-Gaussian stable CF") {
    // E cos(t.X) = exp(-(||t||^2/2)^(alpha/2)), the defining property. Sample
    // kurtosis is useless here (the population fourth moment is infinite),
    // but the CF estimate is bounded and sqrt(n)-consistent.
    const int n = 100000;
    for (double alpha : {1.5, 1.75, 1.99}) {
        RngStream rng(5555 + static_cast<int>(100 * alpha));
        const DataMatrix x = sample(AlternativeSpec::stable_elliptical(alpha, 2), n, rng);
        for (double r : {0.5, 1.0, 2.0}) {
            Eigen::Vector2d t(r * std::sqrt(0.5), r * std::sqrt(0.5));
            double re = 0.0;
            for (int i = 0; i < n; ++i) re += std::cos(t.dot(x.row(i))) / n;
            const double expected = std::exp(-std::pow(0.5 * r * r, 0.5 * alpha));
            CHECK(std::abs(re - expected) < 4.0 / std::sqrt(static_cast<double>(n)));
        }
    }
}

TEST_CASE("stable elliptical approaches the Gaussian as alpha -> 2") {
    // Sample kurtosis medians decrease toward d(d+2) as alpha grows; the
    // population value is infinite for every alpha < 2, so only this monotone
    // approach is testable.
    const auto median_b2 = [](double alpha) {
        std::vector<double> vals;
        for (int seed = 1; seed <= 11; ++seed) {
            RngStream rng(700 + seed);
            const DataMatrix x =
                sample(AlternativeSpec::stable_elliptical(alpha, 2), 20000, rng);
            vals.push_back(mardia_b2(x));
        }
        std::sort(vals.begin(), vals.end());
        return vals[vals.size() / 2];
    };
    const double far = median_b2(1.5);
    const double near = median_b2(1.99);
    CHECK(near < far);
    CHECK(near > 8.0);  // excess kurtosis stays positive
    CHECK(near < 40.0);
}

TEST_CASE("generalized normal with theta = 2 is standard normal") {
    RngStream rng(808);
    const DataMatrix x = sample(AlternativeSpec::gen_normal(2.0, 2), 100000, rng);
    CHECK(std::abs(coordinate_moment(x, 2) - 1.0) < 0.02);
    CHECK(std::abs(coordinate_moment(x, 4) - 3.0) < 0.1);
    CHECK(std::abs(coordinate_moment(x, 1)) < 0.01);
}

TEST_CASE("generalized normal with theta = 1 is double exponential") {
    RngStream rng(809);
    const DataMatrix x = sample(AlternativeSpec::gen_normal(1.0, 1), 200000, rng);
    CHECK(std::abs(coordinate_moment(x, 2) - 1.0) < 0.02);
    CHECK(std::abs(coordinate_moment(x, 4) - 6.0) < 0.3);  // Laplace kurtosis
}

TEST_CASE("pearson II lives on a ball and is standardized") {
    const double a = 4.0;
    RngStream rng(4242);
    const DataMatrix x = sample(AlternativeSpec::pearson2(a, 2), 50000, rng);
    const double radius = std::sqrt(2.0 + 2.0 * a + 2.0);
    CHECK(x.rowwise().norm().maxCoeff() <= radius + 1e-12);
    const Eigen::MatrixXd cov = x.transpose() * x / x.rows();
    CHECK(std::abs(cov(0, 0) - 1.0) < 0.02);
    CHECK(std::abs(cov(1, 1) - 1.0) < 0.02);
    CHECK(std::abs(cov(0, 1)) < 0.02);
}

TEST_CASE("aep default parameters and closed-form moments") {
    const auto p = aep_params_default();
    CHECK(p[0] == 0.4);
    CHECK(p[1] == 1.182);
    CHECK(p[2] == 1.820);

    for (int k : {1, 2, 3}) {
        const double closed = aep_moment(k, p[0], p[1], p[2]);
        const double quad = aep_density_moment(k, p[0], p[1], p[2]);
        CHECK(closed == doctest::Approx(quad).epsilon(1e-8));
    }
}

TEST_CASE("aep sample is standardized and skewed in the oracle direction") {
    const auto p = aep_params_default();
    const double m1 = aep_moment(1, p[0], p[1], p[2]);
    const double m2 = aep_moment(2, p[0], p[1], p[2]);
    const double m3 = aep_moment(3, p[0], p[1], p[2]);
    const double sd = std::sqrt(m2 - m1 * m1);
    const double skew_oracle = (m3 - 3.0 * m1 * m2 + 2.0 * m1 * m1 * m1) / (sd * sd * sd);
    CHECK(std::abs(skew_oracle) > 0.1);  // asymmetric by construction

    RngStream rng(90210);
    const DataMatrix x = sample(AlternativeSpec::aep(1), 200000, rng);
    CHECK(std::abs(coordinate_moment(x, 1)) < 0.02);
    CHECK(std::abs(coordinate_moment(x, 2) - 1.0) < 0.03);
    const double skew_emp = coordinate_moment(x, 3);
    CHECK(skew_emp * skew_oracle > 0.0);
    CHECK(skew_emp == doctest::Approx(skew_oracle).epsilon(0.2));
}

TEST_CASE("aep degenerates to a symmetric law for alpha = 1/2, p1 = p2") {
    RngStream rng(1213);
    const DataMatrix x = sample(AlternativeSpec::aep(1, 0.5, 1.5, 1.5), 200000, rng);
    CHECK(std::abs(coordinate_moment(x, 3)) < 0.03);
}

TEST_CASE("spec strings round trip") {
    for (const char* name : {"n", "la", "t:5", "gn:1.5", "ase:1.75", "pii:4", "cube", "aep"}) {
        const AlternativeSpec spec = AlternativeSpec::parse(name, 2);
        CHECK(spec.to_string() == name);
    }
    CHECK(AlternativeSpec::parse("aep:0.3:1.1:1.9", 2).to_string() == "aep:0.3:1.1:1.9");
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS(AlternativeSpec::parse("t:2", 2), BadParameter);
    CHECK_THROWS_AS(AlternativeSpec::parse("gn:2.5", 2), BadParameter);
    CHECK_THROWS_AS(AlternativeSpec::parse("ase:2", 2), BadParameter);
    CHECK_THROWS_AS(AlternativeSpec::parse("pii:0", 2), BadParameter);
    CHECK_THROWS_AS(AlternativeSpec::parse("what", 2), BadParameter);
    CHECK_THROWS_AS(AlternativeSpec::parse("t", 2), BadParameter);
    RngStream rng(1);
    CHECK_THROWS_AS(sample(AlternativeSpec::normal(2), 0, rng), BadParameter);
}

TEST_SUITE_END();
