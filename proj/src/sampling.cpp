#include "mvnt/sampling.hpp"

#include <cmath>
#include <sstream>

#include "mvnt/errors.hpp"

namespace mvnt {

namespace {

// Positive strictly stable variate A with Laplace transform exp(-s^a),
// 0 < a <= 1, by the Chambers-Mallows-Stuck / Kanter construction. At a = 1
// the law degenerates to the constant 1.
double positive_stable(double a, RngStream& rng) {
    if (a >= 1.0) return 1.0;
    const double u = M_PI * rng.uniform01();
    const double w = rng.exponential();
    const double s = std::sin(a * u) / std::pow(std::sin(u), 1.0 / a);
    return s * std::pow(std::sin((1.0 - a) * u) / w, (1.0 - a) / a);
}

// |X| with density proportional to exp(-x^p / p) on (0, inf).
double exp_power_radius(double p, RngStream& rng) {
    return std::pow(p * rng.gamma(1.0 / p), 1.0 / p);
}

double sign_draw(RngStream& rng) { return rng.uniform01() < 0.5 ? -1.0 : 1.0; }

// Standard deviation of one coordinate of GenNormal(theta) before scaling:
// E X^2 = Gamma(3/theta) / Gamma(1/theta) for density prop. to exp(-|x|^theta).
double gen_normal_sd(double theta) {
    return std::sqrt(std::exp(std::lgamma(3.0 / theta) - std::lgamma(1.0 / theta)));
}

struct AepShape {
    double alpha_star;
    double mean;
    double sd;
};

AepShape aep_shape(double alpha, double p1, double p2) {
    AepShape s;
    const auto kep = [](double p) {
        return std::pow(p, -1.0 / p) / (2.0 * std::exp(std::lgamma(1.0 + 1.0 / p)));
    };
    const double k1 = kep(p1), k2 = kep(p2);
    s.alpha_star = alpha * k1 / (alpha * k1 + (1.0 - alpha) * k2);
    const double m1 = aep_moment(1, alpha, p1, p2);
    const double m2 = aep_moment(2, alpha, p1, p2);
    s.mean = m1;
    s.sd = std::sqrt(m2 - m1 * m1);
    return s;
}

}  // namespace

AlternativeSpec AlternativeSpec::normal(int d) { return {AltKind::Normal, d}; }
AlternativeSpec AlternativeSpec::laplace(int d) { return {AltKind::Laplace, d}; }
AlternativeSpec AlternativeSpec::multi_t(double nu, int d) { return {AltKind::MultiT, d, nu}; }
AlternativeSpec AlternativeSpec::gen_normal(double theta, int d) {
    return {AltKind::GenNormal, d, theta};
}
AlternativeSpec AlternativeSpec::stable_elliptical(double alpha, int d) {
    return {AltKind::StableElliptical, d, alpha};
}
AlternativeSpec AlternativeSpec::pearson2(double a, int d) { return {AltKind::PearsonII, d, a}; }
AlternativeSpec AlternativeSpec::uniform_cube(int d) { return {AltKind::UniformCube, d}; }
AlternativeSpec AlternativeSpec::aep(int d) {
    const auto p = aep_params_default();
    return aep(d, p[0], p[1], p[2]);
}
AlternativeSpec AlternativeSpec::aep(int d, double alpha, double p1, double p2) {
    AlternativeSpec s{AltKind::Aep, d};
    s.aep_alpha = alpha;
    s.aep_p1 = p1;
    s.aep_p2 = p2;
    return s;
}

AlternativeSpec AlternativeSpec::with_dimension(int dim) const {
    AlternativeSpec s = *this;
    s.d = dim;
    return s;
}

void AlternativeSpec::validate() const {
    if (d < 1) throw BadParameter("dimension must be >= 1");
    switch (kind) {
        case AltKind::MultiT:
            if (!(param > 2.0)) throw BadParameter("multivariate t needs nu > 2");
            break;
        case AltKind::GenNormal:
            if (!(param > 0.0 && param <= 2.0)) throw BadParameter("GenNormal needs 0 < theta <= 2");
            break;
        case AltKind::StableElliptical:
            if (!(param > 0.0 && param < 2.0))
                throw BadParameter("StableElliptical needs 0 < alpha < 2");
            break;
        case AltKind::PearsonII:
            if (!(param > 0.0)) throw BadParameter("PearsonII needs a > 0");
            break;
        case AltKind::Aep:
            if (!(aep_alpha > 0.0 && aep_alpha < 1.0 && aep_p1 > 0.0 && aep_p2 > 0.0))
                throw BadParameter("AEP needs 0 < alpha < 1 and positive tail exponents");
            break;
        default:
            break;
    }
}

std::string AlternativeSpec::to_string() const {
    std::ostringstream os;
    switch (kind) {
        case AltKind::Normal: return "n";
        case AltKind::Laplace: return "la";
        case AltKind::MultiT: os << "t:" << param; break;
        case AltKind::GenNormal: os << "gn:" << param; break;
        case AltKind::StableElliptical: os << "ase:" << param; break;
        case AltKind::PearsonII: os << "pii:" << param; break;
        case AltKind::UniformCube: return "cube";
        case AltKind::Aep: {
            const auto def = aep_params_default();
            if (aep_alpha == def[0] && aep_p1 == def[1] && aep_p2 == def[2]) return "aep";
            os << "aep:" << aep_alpha << ':' << aep_p1 << ':' << aep_p2;
            break;
        }
    }
    return os.str();
}

AlternativeSpec AlternativeSpec::parse(const std::string& text, int d) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t colon = text.find(':', pos);
        if (colon == std::string::npos) colon = text.size();
        parts.push_back(text.substr(pos, colon - pos));
        pos = colon + 1;
        if (colon == text.size()) break;
    }
    const auto num = [&](std::size_t i) {
        if (i >= parts.size()) throw BadParameter("missing parameter in '" + text + "'");
        try {
            return std::stod(parts[i]);
        } catch (const std::exception&) {
            throw BadParameter("bad parameter in '" + text + "'");
        }
    };

    const std::string& head = parts[0];
    AlternativeSpec s;
    if (head == "n" || head == "normal")
        s = normal(d);
    else if (head == "la" || head == "laplace")
        s = laplace(d);
    else if (head == "t")
        s = multi_t(num(1), d);
    else if (head == "gn")
        s = gen_normal(num(1), d);
    else if (head == "ase")
        s = stable_elliptical(num(1), d);
    else if (head == "pii")
        s = pearson2(num(1), d);
    else if (head == "cube" || head == "u")
        s = uniform_cube(d);
    else if (head == "aep")
        s = parts.size() > 1 ? aep(d, num(1), num(2), num(3)) : aep(d);
    else
        throw BadParameter("unknown distribution '" + text + "'");
    s.validate();
    return s;
}

std::array<double, 3> aep_params_default() { return {0.4, 1.182, 1.820}; }

double aep_moment(int k, double alpha, double p1, double p2) {
    const auto kep = [](double p) {
        return std::pow(p, -1.0 / p) / (2.0 * std::exp(std::lgamma(1.0 + 1.0 / p)));
    };
    const double k1 = kep(p1), k2 = kep(p2);
    const double astar = alpha * k1 / (alpha * k1 + (1.0 - alpha) * k2);
    const auto side = [&](double mass, double scale, double p) {
        return mass * std::pow(scale, k) * std::pow(p, k / p) *
               std::exp(std::lgamma((k + 1.0) / p) - std::lgamma(1.0 / p));
    };
    const double sign = (k % 2) ? -1.0 : 1.0;
    return sign * side(alpha, 2.0 * astar, p1) + side(1.0 - alpha, 2.0 * (1.0 - astar), p2);
}

DataMatrix sample(const AlternativeSpec& spec, int n, RngStream& rng) {
    spec.validate();
    if (n < 1) throw BadParameter("sample size must be >= 1");
    const int d = spec.d;
    DataMatrix x(n, d);

    switch (spec.kind) {
        case AltKind::Normal:
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < d; ++j) x(i, j) = rng.normal();
            break;

        case AltKind::Laplace:
            // sqrt(E) Z with E ~ Exp(1): symmetric multivariate Laplace,
            // identity covariance since E[E] = 1.
            for (int i = 0; i < n; ++i) {
                const double r = std::sqrt(rng.exponential());
                for (int j = 0; j < d; ++j) x(i, j) = r * rng.normal();
            }
            break;

        case AltKind::MultiT: {
            const double nu = spec.param;
            for (int i = 0; i < n; ++i) {
                // Z sqrt((nu-2)/V), V ~ chi^2_nu: multivariate t scaled to
                // identity covariance.
                const double r = std::sqrt((nu - 2.0) / rng.chi_squared(nu));
                for (int j = 0; j < d; ++j) x(i, j) = r * rng.normal();
            }
            break;
        }

        case AltKind::GenNormal: {
            // Coordinates with density prop. to exp(-|x|^theta): |X| is
            // Gamma(1/theta)^(1/theta); scaled to unit variance so theta = 2
            // is exactly N(0,1).
            const double theta = spec.param;
            const double sd = gen_normal_sd(theta);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < d; ++j)
                    x(i, j) = sign_draw(rng) * std::pow(rng.gamma(1.0 / theta), 1.0 / theta) / sd;
            break;
        }

        case AltKind::StableElliptical:
            // Sub-Gaussian symmetric alpha-stable: sqrt(A) Z with A positive
            // (alpha/2)-stable. No finite variance, so no standardization.
            for (int i = 0; i < n; ++i) {
                const double r = std::sqrt(positive_stable(0.5 * spec.param, rng));
                for (int j = 0; j < d; ++j) x(i, j) = r * rng.normal();
            }
            break;

        case AltKind::PearsonII: {
            // R U with U uniform on the sphere and R^2 ~ Beta(d/2, a+1) gives
            // density prop. to (1 - x.x)^a on the unit ball; scaled to unit
            // covariance (factor sqrt(d + 2a + 2)).
            const double scale = std::sqrt(d + 2.0 * spec.param + 2.0);
            for (int i = 0; i < n; ++i) {
                Eigen::VectorXd z(d);
                for (int j = 0; j < d; ++j) z[j] = rng.normal();
                z /= z.norm();
                const double r = std::sqrt(rng.beta(0.5 * d, spec.param + 1.0));
                x.row(i) = (scale * r) * z.transpose();
            }
            break;
        }

        case AltKind::UniformCube:
            // Raw U(0,1)^d, the reference convention for the power tables.
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < d; ++j) x(i, j) = rng.uniform01();
            break;

        case AltKind::Aep: {
            const AepShape shape = aep_shape(spec.aep_alpha, spec.aep_p1, spec.aep_p2);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < d; ++j) {
                    double v;
                    if (rng.uniform01() < spec.aep_alpha)
                        v = -2.0 * shape.alpha_star * exp_power_radius(spec.aep_p1, rng);
                    else
                        v = 2.0 * (1.0 - shape.alpha_star) * exp_power_radius(spec.aep_p2, rng);
                    x(i, j) = (v - shape.mean) / shape.sd;
                }
            break;
        }
    }
    return x;
}

}  // namespace mvnt
