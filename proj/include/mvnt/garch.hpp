#pragma once

#include <optional>
#include <string>

#include "mvnt/sampling.hpp"
#include "mvnt/standardize.hpp"
#include "mvnt/statistics.hpp"

namespace mvnt {

/// CCC-GARCH(1,1) parameters: sigma_j = b + B1 X_{j-1}^(2) + G1 sigma_{j-1}
/// with conditional covariance Sigma_j = D_j R D_j, D_j = diag(sqrt(sigma_j)).
struct GarchSpec {
    Eigen::VectorXd b;   // positive intercepts
    Eigen::MatrixXd B1;  // nonnegative ARCH loadings
    Eigen::MatrixXd G1;  // nonnegative GARCH loadings
    Eigen::MatrixXd R;   // constant conditional correlation

    int d() const { return static_cast<int>(b.size()); }

    /// Perron root of B1 + G1; < 1 is the second-order stationarity guard.
    double companion_spectral_radius() const;

    /// Throws BadParameter / NonStationary on violated invariants.
    void validate() const;

    /// Unconditional mean of the sigma recursion, (I - B1 - G1)^{-1} b.
    Eigen::VectorXd unconditional_sigma() const;

    std::string to_json() const;
    static GarchSpec from_json(const std::string& text);
};

struct GarchPath {
    Eigen::MatrixXd x;             // n x d observations
    Eigen::MatrixXd sigma_series;  // n x d conditional variances
    Eigen::MatrixXd innovations;   // n x d: simulated eps or filtered residuals
};

enum class VolInit { unconditional, sample_variance };

struct GarchFit {
    GarchSpec theta_hat;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
    Eigen::MatrixXd residuals;  // eps_tilde_j(theta_hat); not re-standardized
};

/// Simulates n observations after discarding burn_in, starting the recursion
/// from the unconditional variance. Innovations come from `innovation`
/// (which should be variance-standardized) on the given stream.
GarchPath garch_simulate(const GarchSpec& spec, int n, int burn_in,
                         const AlternativeSpec& innovation, RngStream& rng);

/// Reconstructs the volatility series from data under `spec` and extracts
/// residuals eps_j = Sigma_j^{-1/2} X_j via the symmetric root. A round trip
/// with garch_simulate (same init, no burn-in) recovers the innovations
/// exactly; differing inits are forgotten geometrically.
GarchPath garch_filter(const GarchSpec& spec, const Eigen::MatrixXd& x,
                       VolInit init = VolInit::unconditional);

/// Gaussian QMLE over the constrained parameter space (log reparameterization
/// for b, B1, G1; spherical Cholesky angles for R). On failure to converge the
/// best iterate is returned with converged = false after three jittered
/// restarts. Throws DegenerateData if a coordinate of x is constant.
GarchFit qmle_fit(const Eigen::MatrixXd& x,
                  const std::optional<GarchSpec>& init_guess = std::nullopt);

/// T^G or Ttilde^G: the closed-form statistics evaluated on the residuals
/// as-is — innovations are model-centered, so no empirical standardization.
/// For the Ttilde family, `scaled` carries the z-score Ttilde/sigma.
TestResult garch_test(const GarchFit& fit, const WeightConfig& w, StatFamily family);

enum class TestSide { one, two };

/// Conditional parametric bootstrap: fit, simulate m_boot Gaussian paths from
/// the fitted model, refit each, and compare the statistic against the
/// resampled ones. p = (1 + #{T* >= T}) / (m_boot + 1); the two-sided variant
/// ranks |Ttilde|. Aborts with BootstrapUnstable if more than 5% of the
/// replicates fail.
TestResult bootstrap_test(const Eigen::MatrixXd& x, const WeightConfig& w, StatFamily family,
                          int m_boot, RngStream& rng, TestSide side = TestSide::one,
                          double alpha = 0.05);

/// The bivariate / trivariate CCC-GARCH(1,1) benchmark parameter sets used by
/// the Monte Carlo study, with correlation r.
GarchSpec bivariate_benchmark_spec(double r);
GarchSpec trivariate_benchmark_spec(double r);

}  // namespace mvnt
