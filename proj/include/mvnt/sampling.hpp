#pragma once

#include <array>
#include <string>

#include "mvnt/rng.hpp"
#include "mvnt/standardize.hpp"

namespace mvnt {

enum class AltKind { Normal, Laplace, MultiT, GenNormal, StableElliptical, PearsonII, UniformCube, Aep };

/// A sampling distribution for the Monte Carlo studies: the null plus every
/// alternative of the power tables. Except where no variance exists
/// (StableElliptical) or the reference convention is raw (UniformCube),
/// samples are standardized to zero mean and identity covariance so they can
/// double as GARCH innovations.
struct AlternativeSpec {
    AltKind kind = AltKind::Normal;
    int d = 0;
    double param = 0.0;  // nu / theta / alpha / a, depending on kind
    double aep_alpha = 0.0, aep_p1 = 0.0, aep_p2 = 0.0;

    static AlternativeSpec normal(int d);
    static AlternativeSpec laplace(int d);
    static AlternativeSpec multi_t(double nu, int d);
    static AlternativeSpec gen_normal(double theta, int d);
    static AlternativeSpec stable_elliptical(double alpha, int d);
    static AlternativeSpec pearson2(double a, int d);
    static AlternativeSpec uniform_cube(int d);
    static AlternativeSpec aep(int d);
    static AlternativeSpec aep(int d, double alpha, double p1, double p2);

    AlternativeSpec with_dimension(int dim) const;

    void validate() const;  // throws BadParameter

    /// Short CLI form: "n", "la", "t:5", "gn:1.5", "ase:1.75", "pii:4",
    /// "cube", "aep" or "aep:a:p1:p2".
    std::string to_string() const;
    static AlternativeSpec parse(const std::string& text, int d);
};

/// n i.i.d. draws, one observation per row.
DataMatrix sample(const AlternativeSpec& spec, int n, RngStream& rng);

/// The asymmetric-exponential-power parameter set used by the GARCH power
/// study: (0.4, 1.182, 1.820).
std::array<double, 3> aep_params_default();

/// k-th raw moment of the unscaled AEP(alpha, p1, p2) law, in closed form.
double aep_moment(int k, double alpha, double p1, double p2);

}  // namespace mvnt
