#pragma once

#include <optional>
#include <utility>

#include "mvnt/standardize.hpp"

namespace mvnt {

/// Weight parameter of w_gamma(t) = exp(-gamma ||t||^2) plus the data
/// dimension. gamma > 0 suffices to compute the statistics; gamma > 1 is
/// required by everything that invokes the asymptotic theory.
struct WeightConfig {
    double gamma;
    int d;
};

enum class StatFamily { T, Ttilde, HW, TGarch, TtildeGarch };

struct Decision {
    bool reject = false;
    double alpha = 0.0;
    std::optional<double> critical_value;
    std::optional<double> p_value;
};

/// A computed test statistic. `statistic` is the raw value; `scaled` is the
/// tabulated convention: (gamma/pi)^{d/2} T for the T family, Ttilde/sigma
/// for the Ttilde family when gamma > 1 (NaN otherwise), and the raw value
/// for HW.
struct TestResult {
    double statistic = 0.0;
    double scaled = 0.0;
    StatFamily family = StatFamily::T;
    double gamma_or_beta = 0.0;
    int n = 0;
    int d = 0;
    std::optional<Decision> decision;
};

/// Mardia skewness b1, Mori-Rohatgi-Szekely skewness b1_mrs, Mardia
/// kurtosis b2, all computed from the Gram matrix of scaled residuals.
struct MomentSummary {
    double b1 = 0.0;
    double b1_mrs = 0.0;
    double b2 = 0.0;
};

struct AsymptoticConstants {
    double sigma2 = 0.0;
    double mean_w_norm = 0.0;
};

/// Overflow cap on exponent arguments. Statistics refuse to saturate.
inline constexpr double kExpCap = 700.0;

/// The empirical process sqrt(n) (R_n(t) M_n(t) - 1) at a single point t,
/// where R_n is the empirical cosine transform and M_n the empirical moment
/// generating function of the residuals. Throws ExpOverflow if some t.Y_j
/// exceeds exp_cap; the caller should shrink the integration domain.
double u_process(const ScaledResiduals& y, const Eigen::VectorXd& t, double exp_cap = kExpCap);

/// Weighted L2 statistic T_{n,gamma} = int U_n(t)^2 w_gamma(t) dt, evaluated
/// by its exact closed form (a fourfold sum over residual pairs, reduced in
/// O(n^2) memory). Nonnegative up to roundoff; affine invariant.
TestResult t_stat(const ScaledResiduals& y, const WeightConfig& w);

/// Linear statistic Ttilde_{n,gamma} = int U_n(t) w_gamma(t) dt via its
/// O(n^2) closed form. May be negative.
TestResult t_tilde_stat(const ScaledResiduals& y, const WeightConfig& w);

MomentSummary moment_summary(const ScaledResiduals& y);

/// (gamma^{3+d/2} 96 T_{n,gamma} / (n pi^{d/2}), 2 b1 + 3 b1_mrs): the scaled
/// statistic converges to the skewness combination as gamma grows. Evaluated
/// in extended precision since the closed form cancels to O(gamma^-3).
std::pair<double, double> limit_check_t(const ScaledResiduals& y, double gamma);

/// (gamma^{2+d/2} 16 Ttilde / (sqrt(n) pi^{d/2}), b2 - d(d+2)).
std::pair<double, double> limit_check_ttilde(const ScaledResiduals& y, double gamma);

/// BHEP-type competitor statistic with smoothing parameter beta:
/// n int |phi_n(t) - exp(-||t||^2/2)|^2 dN(0, beta^2 I)(t) in closed form.
TestResult hw_stat(const ScaledResiduals& y, double beta);

/// Variance of the normal limit of Ttilde_{n,gamma}:
/// 2 pi^d (g^2-1/4)^{-d/2} + 2 pi^d (g^2+1/4)^{-d/2} - 4 pi^d g^{-d}.
/// Throws GammaTooSmall if gamma <= 1.
double sigma2_closed(const WeightConfig& w);

/// E ||W||^2 in the weighted L2 space, in closed form (Gaussian and Fresnel
/// type one-dimensional integrals). Throws GammaTooSmall if gamma <= 1.
double mean_w_norm(const WeightConfig& w);

enum class KernelVariant { iid, garch };

/// Covariance kernel of the limiting Gaussian element:
///   C(s,t) = e^{s.t} + (e^{s.t} + e^{-s.t})/2 + 2 cos(s.t) - s.t - 4
/// for the iid variant; the garch variant drops the -s.t term.
double kernel_c(const Eigen::VectorXd& s, const Eigen::VectorXd& t, KernelVariant variant);

namespace detail {

/// Brace factor of the T_{n,gamma} closed form, i.e. T * (gamma/pi)^{d/2},
/// by direct compensated summation over pair x pair. Reference path; the
/// production path in t_stat must agree to near machine precision.
double t_braces_reference(const ScaledResiduals& y, double gamma);

}  // namespace detail

}  // namespace mvnt
