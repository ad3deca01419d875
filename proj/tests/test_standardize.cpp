#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mvnt/csv.hpp"
#include "mvnt/errors.hpp"
#include "mvnt/rng.hpp"
#include "mvnt/standardize.hpp"

using namespace mvnt;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, RngStream& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

// Random nonsingular matrix with singular values in [0.5, 3].
Eigen::MatrixXd random_well_conditioned(int d, RngStream& rng) {
    const Eigen::MatrixXd m = random_matrix(d, d, rng);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd s(d);
    for (int i = 0; i < d; ++i) s[i] = 0.5 + 2.5 * rng.uniform01();
    return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

// Independent closed-form inverse square root of a symmetric 2x2 matrix.
Eigen::Matrix2d inv_sqrt_2x2_oracle(const Eigen::Matrix2d& m) {
    const double a = m(0, 0), b = m(0, 1), c = m(1, 1);
    const double theta = 0.5 * std::atan2(2.0 * b, a - c);
    const double mid = 0.5 * (a + c);
    const double rad = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    const double l1 = mid + rad, l2 = mid - rad;
    Eigen::Matrix2d q;
    q << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    Eigen::Matrix2d dinv = Eigen::Matrix2d::Zero();
    dinv(0, 0) = 1.0 / std::sqrt(l1);
    dinv(1, 1) = 1.0 / std::sqrt(l2);
    return q * dinv * q.transpose();
}

}  // namespace

TEST_SUITE_BEGIN("standardize");

TEST_CASE("sym_inv_sqrt identity and diagonal") {
    const Eigen::MatrixXd r1 = sym_inv_sqrt(Eigen::MatrixXd::Identity(3, 3));
    CHECK((r1 - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-14);

    Eigen::Matrix2d diag = Eigen::Vector2d(4.0, 9.0).asDiagonal();
    const Eigen::MatrixXd r2 = sym_inv_sqrt(diag);
    CHECK(r2(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(r2(1, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(std::abs(r2(0, 1)) < 1e-15);
}

TEST_CASE("sym_inv_sqrt multiplication oracle on random SPD matrices") {
    RngStream rng(42);
    for (int rep = 0; rep < 20; ++rep) {
        const Eigen::MatrixXd a = random_matrix(4, 4, rng);
        const Eigen::MatrixXd m =
            a * a.transpose() + 0.1 * Eigen::MatrixXd::Identity(4, 4);
        const Eigen::MatrixXd r = sym_inv_sqrt(m);
        CHECK((r - r.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((r * m * r - Eigen::MatrixXd::Identity(4, 4)).operatorNorm() < 1e-10);
    }
}

TEST_CASE("sym_inv_sqrt rejects bad input") {
    Eigen::Matrix2d asym;
    asym << 1.0, 0.5, 0.1, 1.0;
    CHECK_THROWS_AS(sym_inv_sqrt(asym), NotSpd);

    Eigen::Matrix2d singular;
    singular << 1.0, 1.0, 1.0, 1.0;
    CHECK_THROWS_AS(sym_inv_sqrt(singular), NotSpd);
}

TEST_CASE("two-point sample in one dimension") {
    Eigen::MatrixXd x(2, 1);
    x << -1.0, 1.0;
    const ScaledResiduals r = scaled_residuals(x);
    // mean 0 and S_n = 1 with the divisor-n convention
    CHECK(r.y(0, 0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(r.y(1, 0) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("residuals match a step-by-step hand computation (d=2, n=5)") {
    Eigen::MatrixXd x(5, 2);
    x << 1.3, -0.2, 0.4, 2.1, -1.7, 0.8, 2.2, 1.1, 0.6, -1.9;

    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    for (int i = 0; i < 5; ++i) mean += x.row(i).transpose();
    mean /= 5.0;
    Eigen::Matrix2d s = Eigen::Matrix2d::Zero();
    for (int i = 0; i < 5; ++i) {
        const Eigen::Vector2d c = x.row(i).transpose() - mean;
        s += c * c.transpose();
    }
    s /= 5.0;  // divisor n
    const Eigen::Matrix2d root = inv_sqrt_2x2_oracle(s);

    const ScaledResiduals r = scaled_residuals(x);
    for (int i = 0; i < 5; ++i) {
        const Eigen::Vector2d expected = root * (x.row(i).transpose() - mean);
        CHECK((r.y.row(i).transpose() - expected).norm() < 1e-12);
    }
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) {
            double dot = 0.0;
            for (int k = 0; k < 2; ++k) dot += r.y(i, k) * r.y(j, k);
            CHECK(r.gram(i, j) == doctest::Approx(dot).epsilon(1e-12));
        }
}

TEST_CASE("residual identities") {
    RngStream rng(7);
    const int n = 40, d = 3;
    const Eigen::MatrixXd x = random_matrix(n, d, rng);
    const ScaledResiduals r = scaled_residuals(x);

    CHECK(r.y.colwise().sum().cwiseAbs().maxCoeff() < 1e-9 * n);
    CHECK(std::abs(r.sq_norms.sum() - n * d) < 1e-8 * n * d);
    CHECK((r.y.transpose() * r.y / n - Eigen::MatrixXd::Identity(d, d))
              .cwiseAbs()
              .maxCoeff() < 1e-9);

    double pair_sum = 0.0;
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
            pair_sum += (r.y.row(j) + r.y.row(k)).squaredNorm();
    CHECK(std::abs(pair_sum - 2.0 * n * n * d) < 1e-7 * n * n * d);

    const Standardization s = standardize(x);
    CHECK((s.inv_sqrt * s.cov * s.inv_sqrt - Eigen::MatrixXd::Identity(d, d)).operatorNorm() <
          1e-10);
}

TEST_CASE("gram is invariant under full-rank affine transformations") {
    RngStream rng(11);
    const int n = 25, d = 2;
    const Eigen::MatrixXd x = random_matrix(n, d, rng);
    const Eigen::MatrixXd base_gram = scaled_residuals(x).gram;

    for (int rep = 0; rep < 10; ++rep) {
        const Eigen::MatrixXd a = random_well_conditioned(d, rng);
        const Eigen::VectorXd b = random_matrix(d, 1, rng);
        const Eigen::MatrixXd tx = (x * a.transpose()).rowwise() + b.transpose();
        CHECK((scaled_residuals(tx).gram - base_gram).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("guards") {
    Eigen::MatrixXd too_few(3, 3);
    too_few << 1, 2, 3, 4, 5, 6, 7, 8, 10;
    CHECK_THROWS_AS(scaled_residuals(too_few), TooFewRows);

    RngStream rng(3);
    Eigen::MatrixXd collinear(10, 2);
    for (int i = 0; i < 10; ++i) {
        collinear(i, 0) = rng.normal();
        collinear(i, 1) = 2.0 * collinear(i, 0);
    }
    CHECK_THROWS_AS(scaled_residuals(collinear), SingularCovariance);
}

TEST_CASE("csv round trip and validation") {
    std::istringstream good("1.5,2\n-0.25,3e-1\n4,5\n");
    const DataMatrix m = read_csv(good);
    CHECK(m.rows() == 3);
    CHECK(m(1, 1) == doctest::Approx(0.3));

    std::istringstream with_header("a,b\n1,2\n3,4\n");
    CHECK(read_csv(with_header, true).rows() == 2);

    std::istringstream nan_row("1,2\nnan,4\n");
    CHECK_THROWS_AS(read_csv(nan_row), CsvError);
    std::istringstream inf_row("1,2\ninf,4\n");
    CHECK_THROWS_AS(read_csv(inf_row), CsvError);
    std::istringstream ragged("1,2\n3\n");
    CHECK_THROWS_AS(read_csv(ragged), CsvError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_csv(empty), CsvError);

    RngStream rng(5);
    const Eigen::MatrixXd orig = random_matrix(6, 3, rng);
    std::ostringstream out;
    write_csv(out, orig);
    std::istringstream in(out.str());
    CHECK((read_csv(in) - orig).cwiseAbs().maxCoeff() == 0.0);
}

TEST_SUITE_END();
