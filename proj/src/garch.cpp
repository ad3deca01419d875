#include "mvnt/garch.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <json.hpp>

#include "mvnt/bfgs.hpp"
#include "mvnt/errors.hpp"

namespace mvnt {

namespace {

constexpr double kSigmaBlowup = 1e100;
// Bootstrap resamples are fresh stationary paths from the fitted model, so
// they share the data's initialization transient structure.
constexpr int kResampleBurnIn = 500;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Perron root of a small nonnegative matrix by power iteration; cheap enough
// for the inner loop of the QMLE objective.
double perron_root(const Eigen::MatrixXd& m) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows());
    double lambda = 0.0;
    for (int it = 0; it < 50; ++it) {
        Eigen::VectorXd w = m * v;
        const double norm = w.norm();
        if (norm < 1e-300) return 0.0;
        const double next = v.dot(w) / v.dot(v);
        v = w / norm;
        if (it > 5 && std::abs(next - lambda) < 1e-12 * std::max(1.0, next)) return next;
        lambda = next;
    }
    return lambda;
}

// Correlation matrix from spherical Cholesky angles in (0, pi):
// row i of L lives on the unit sphere, R = L L'.
Eigen::MatrixXd corr_from_angles(const Eigen::VectorXd& angles, int d) {
    Eigen::MatrixXd lmat = Eigen::MatrixXd::Zero(d, d);
    lmat(0, 0) = 1.0;
    int a = 0;
    for (int i = 1; i < d; ++i) {
        double prod = 1.0;
        for (int j = 0; j < i; ++j) {
            const double phi = angles[a++];
            lmat(i, j) = std::cos(phi) * prod;
            prod *= std::sin(phi);
        }
        lmat(i, i) = prod;
    }
    return lmat * lmat.transpose();
}

Eigen::VectorXd angles_from_corr(const Eigen::MatrixXd& r) {
    const int d = static_cast<int>(r.rows());
    const Eigen::MatrixXd lmat = Eigen::LLT<Eigen::MatrixXd>(r).matrixL();
    Eigen::VectorXd angles(d * (d - 1) / 2);
    int a = 0;
    for (int i = 1; i < d; ++i) {
        double prod = 1.0;
        for (int j = 0; j < i; ++j) {
            const double c = std::clamp(lmat(i, j) / std::max(prod, 1e-12), -1.0, 1.0);
            const double phi = std::acos(c);
            angles[a++] = phi;
            prod *= std::sin(phi);
        }
    }
    return angles;
}

// Unconstrained coordinates <-> parameter space: log for b, B1, G1 entries,
// logistic-scaled angles for R.
struct ParamMap {
    int d;

    int size() const { return d + 2 * d * d + d * (d - 1) / 2; }

    // exp with the argument clamped so entries stay strictly positive and
    // finite no matter where the optimizer wanders
    static double safe_exp(double u) { return std::exp(std::clamp(u, -46.0, 46.0)); }

    GarchSpec decode(const Eigen::VectorXd& u) const {
        GarchSpec s;
        int p = 0;
        s.b.resize(d);
        for (int i = 0; i < d; ++i) s.b[i] = safe_exp(u[p++]);
        s.B1.resize(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s.B1(i, j) = safe_exp(u[p++]);
        s.G1.resize(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) s.G1(i, j) = safe_exp(u[p++]);
        Eigen::VectorXd angles(d * (d - 1) / 2);
        for (int i = 0; i < angles.size(); ++i) angles[i] = M_PI / (1.0 + std::exp(-u[p++]));
        s.R = corr_from_angles(angles, d);
        return s;
    }

    Eigen::VectorXd encode(const GarchSpec& s) const {
        Eigen::VectorXd u(size());
        int p = 0;
        const auto log_clamped = [](double v) { return std::log(std::max(v, 1e-12)); };
        for (int i = 0; i < d; ++i) u[p++] = log_clamped(s.b[i]);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) u[p++] = log_clamped(s.B1(i, j));
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) u[p++] = log_clamped(s.G1(i, j));
        const Eigen::VectorXd angles = angles_from_corr(s.R);
        for (int i = 0; i < angles.size(); ++i) {
            const double phi = std::clamp(angles[i], 1e-6, M_PI - 1e-6);
            u[p++] = std::log(phi / (M_PI - phi));
        }
        return u;
    }
};

// sigma_1 seed of the filter recursion: both X_0^(2) and sigma_0 are replaced
// by the same init vector, so sigma_1 = b + (B1 + G1) init.
Eigen::VectorXd filter_init_vector(const GarchSpec& s, VolInit init,
                                   const Eigen::MatrixXd& x) {
    if (init == VolInit::sample_variance) return x.array().square().colwise().mean();
    return s.unconditional_sigma();
}

// sum_j (X_j' Sigma_j^{-1} X_j + log|Sigma_j|) along the filtered volatility
// path, or +inf when the recursion leaves the feasible region.
double neg2_loglik_sum(const GarchSpec& s, const Eigen::MatrixXd& x, const Eigen::MatrixXd& x2,
                       VolInit init, const Eigen::VectorXd& sample_var_init) {
    const int n = static_cast<int>(x.rows());
    const int d = s.d();

    const Eigen::LLT<Eigen::MatrixXd> llt(s.R);
    if (llt.info() != Eigen::Success) return kInf;
    double logdet_r = 0.0;
    for (int i = 0; i < d; ++i) logdet_r += 2.0 * std::log(llt.matrixLLT()(i, i));

    Eigen::VectorXd sigma =
        init == VolInit::sample_variance ? sample_var_init : s.unconditional_sigma();
    if (!(sigma.minCoeff() > 0.0) || !sigma.allFinite()) return kInf;
    Eigen::VectorXd prev_x2 = sigma;

    double acc = 0.0;
    Eigen::VectorXd z(d);
    for (int j = 0; j < n; ++j) {
        sigma = s.b + s.B1 * prev_x2 + s.G1 * sigma;
        if (!(sigma.maxCoeff() < kSigmaBlowup)) return kInf;
        double logdet = logdet_r;
        for (int i = 0; i < d; ++i) {
            z[i] = x(j, i) / std::sqrt(sigma[i]);
            logdet += std::log(sigma[i]);
        }
        acc += llt.matrixL().solve(z).squaredNorm() + logdet;
        prev_x2 = x2.row(j);
    }
    return acc;
}

// Per-observation QMLE objective with a smooth stationarity penalty; +inf is
// a wall the line search backs away from.
double qmle_objective(const GarchSpec& s, const Eigen::MatrixXd& x, const Eigen::MatrixXd& x2,
                      VolInit init, const Eigen::VectorXd& sample_var_init) {
    const double rho = perron_root(s.B1 + s.G1);
    if (rho >= 0.9995) return kInf;
    double penalty = 0.0;
    if (rho > 0.995) penalty = 1e4 * (rho - 0.995) * (rho - 0.995);

    const double sum = neg2_loglik_sum(s, x, x2, init, sample_var_init);
    return sum / (2.0 * x.rows()) + penalty;
}

double loglik_at(const GarchSpec& s, const Eigen::MatrixXd& x, VolInit init) {
    const Eigen::MatrixXd x2 = x.array().square();
    const Eigen::VectorXd sv = x2.colwise().mean();
    return -0.5 * neg2_loglik_sum(s, x, x2, init, sv);
}

}  // namespace

double GarchSpec::companion_spectral_radius() const {
    Eigen::EigenSolver<Eigen::MatrixXd> es(B1 + G1, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

void GarchSpec::validate() const {
    const int dim = d();
    if (dim < 1) throw BadParameter("garch spec: empty intercept");
    if (b.minCoeff() <= 0.0) throw BadParameter("garch spec: intercept must be positive");
    if (B1.rows() != dim || B1.cols() != dim || G1.rows() != dim || G1.cols() != dim ||
        R.rows() != dim || R.cols() != dim)
        throw BadParameter("garch spec: shape mismatch");
    if (B1.minCoeff() < 0.0 || G1.minCoeff() < 0.0)
        throw BadParameter("garch spec: loadings must be nonnegative");
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw BadParameter("garch spec: R must be symmetric");
    if ((R.diagonal().array() - 1.0).abs().maxCoeff() > 1e-10)
        throw BadParameter("garch spec: R must have unit diagonal");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw BadParameter("garch spec: R must be positive definite");
    if (companion_spectral_radius() >= 1.0)
        throw NonStationary("garch spec: spectral radius of B1 + G1 must be < 1");
}

Eigen::VectorXd GarchSpec::unconditional_sigma() const {
    const int dim = d();
    return (Eigen::MatrixXd::Identity(dim, dim) - B1 - G1).partialPivLu().solve(b);
}

std::string GarchSpec::to_json() const {
    nlohmann::json j;
    j["b"] = std::vector<double>(b.data(), b.data() + b.size());
    const auto mat = [](const Eigen::MatrixXd& m) {
        std::vector<std::vector<double>> rows;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            rows.emplace_back();
            for (Eigen::Index k = 0; k < m.cols(); ++k) rows.back().push_back(m(i, k));
        }
        return rows;
    };
    j["B1"] = mat(B1);
    j["G1"] = mat(G1);
    j["R"] = mat(R);
    return j.dump(2);
}

GarchSpec GarchSpec::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw BadParameter(std::string("garch spec json: ") + e.what());
    }
    const auto vec = [&](const char* key) {
        const auto v = j.at(key).get<std::vector<double>>();
        return Eigen::Map<const Eigen::VectorXd>(v.data(), v.size()).eval();
    };
    const auto mat = [&](const char* key) {
        const auto rows = j.at(key).get<std::vector<std::vector<double>>>();
        Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != static_cast<std::size_t>(m.cols()))
                throw BadParameter("garch spec json: ragged matrix");
            for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
        }
        return m;
    };
    GarchSpec s;
    try {
        s.b = vec("b");
        s.B1 = mat("B1");
        s.G1 = mat("G1");
        s.R = mat("R");
    } catch (const nlohmann::json::exception& e) {
        throw BadParameter(std::string("garch spec json: ") + e.what());
    }
    s.validate();
    return s;
}

GarchPath garch_simulate(const GarchSpec& spec, int n, int burn_in,
                         const AlternativeSpec& innovation, RngStream& rng) {
    spec.validate();
    if (n < 1 || burn_in < 0) throw BadParameter("garch_simulate: bad sizes");
    const int d = spec.d();
    if (innovation.d != d) throw BadParameter("garch_simulate: innovation dimension mismatch");

    const int total = n + burn_in;
    const Eigen::MatrixXd eps = sample(innovation, total, rng);

    GarchPath path;
    path.x.resize(n, d);
    path.sigma_series.resize(n, d);
    path.innovations.resize(n, d);

    Eigen::VectorXd sigma = spec.unconditional_sigma();
    Eigen::VectorXd prev_x2 = sigma;
    for (int j = 0; j < total; ++j) {
        sigma = spec.b + spec.B1 * prev_x2 + spec.G1 * sigma;
        if (!(sigma.maxCoeff() < kSigmaBlowup))
            throw NumericBlowup("garch_simulate: conditional variance blew up");
        const Eigen::VectorXd droot = sigma.cwiseSqrt();
        const Eigen::MatrixXd cov = droot.asDiagonal() * spec.R * droot.asDiagonal();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
        const Eigen::MatrixXd root = es.eigenvectors() *
                                     es.eigenvalues().cwiseSqrt().asDiagonal() *
                                     es.eigenvectors().transpose();
        const Eigen::VectorXd xj = root * eps.row(j).transpose();
        if (j >= burn_in) {
            path.x.row(j - burn_in) = xj;
            path.sigma_series.row(j - burn_in) = sigma;
            path.innovations.row(j - burn_in) = eps.row(j);
        }
        prev_x2 = xj.array().square();
    }
    return path;
}

GarchPath garch_filter(const GarchSpec& spec, const Eigen::MatrixXd& x, VolInit init) {
    spec.validate();
    const int n = static_cast<int>(x.rows());
    const int d = spec.d();
    if (x.cols() != d) throw BadParameter("garch_filter: dimension mismatch");

    GarchPath path;
    path.x = x;
    path.sigma_series.resize(n, d);
    path.innovations.resize(n, d);

    Eigen::VectorXd sigma = filter_init_vector(spec, init, x);
    Eigen::VectorXd prev_x2 = sigma;
    for (int j = 0; j < n; ++j) {
        sigma = spec.b + spec.B1 * prev_x2 + spec.G1 * sigma;
        if (!(sigma.maxCoeff() < kSigmaBlowup))
            throw NumericBlowup("garch_filter: conditional variance blew up");
        const Eigen::VectorXd droot = sigma.cwiseSqrt();
        const Eigen::MatrixXd cov = droot.asDiagonal() * spec.R * droot.asDiagonal();
        path.sigma_series.row(j) = sigma;
        path.innovations.row(j) = sym_inv_sqrt(cov) * x.row(j).transpose();
        prev_x2 = x.row(j).array().square();
    }
    return path;
}

GarchFit qmle_fit(const Eigen::MatrixXd& x, const std::optional<GarchSpec>& init_guess) {
    const int n = static_cast<int>(x.rows());
    const int d = static_cast<int>(x.cols());
    if (n < 2 * d + 2) throw TooFewRows("qmle_fit: sample too small");
    if (!x.allFinite()) throw DataError("qmle_fit: data contains non-finite values");

    const Eigen::MatrixXd x2 = x.array().square();
    const Eigen::VectorXd sample_var = x2.colwise().mean();
    const Eigen::VectorXd col_mean = x.colwise().mean();
    for (int i = 0; i < d; ++i) {
        const double var = sample_var[i] - col_mean[i] * col_mean[i];
        if (!(var > 1e-12)) throw DegenerateData("qmle_fit: a coordinate is constant");
    }

    const ParamMap map{d};
    const auto objective = [&](const Eigen::VectorXd& u) {
        return qmle_objective(map.decode(u), x, x2, VolInit::unconditional, sample_var);
    };

    GarchSpec start;
    if (init_guess) {
        start = *init_guess;
    } else {
        start.b = 0.05 * sample_var;
        start.B1 = Eigen::MatrixXd::Constant(d, d, 1e-3) +
                   0.049 * Eigen::MatrixXd::Identity(d, d);
        start.G1 = Eigen::MatrixXd::Constant(d, d, 1e-3) +
                   0.849 * Eigen::MatrixXd::Identity(d, d);
        // Sample correlation of marginally standardized data.
        Eigen::MatrixXd corr(d, d);
        const Eigen::MatrixXd centered = x.rowwise() - col_mean.transpose();
        const Eigen::MatrixXd cov = centered.transpose() * centered / double(n);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const double c = cov(i, j) / std::sqrt(cov(i, i) * cov(j, j));
                corr(i, j) = i == j ? 1.0 : std::clamp(c, -0.99, 0.99);
            }
        start.R = corr;
    }

    BfgsOptions opts;
    BfgsResult best;
    best.f = kInf;
    int total_iterations = 0;
    for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::VectorXd u0 = map.encode(start);
        if (attempt > 0) {
            RngStream jitter(0x51a7ce11u, attempt);
            for (Eigen::Index i = 0; i < u0.size(); ++i) u0[i] += 0.3 * jitter.normal();
        }
        BfgsResult res = minimize_bfgs(objective, u0, opts);
        total_iterations += res.iterations;
        if (res.f < best.f) best = res;
        if (best.converged) break;
    }
    if (!std::isfinite(best.f)) throw NumericError("qmle_fit: no feasible iterate found");

    GarchFit fit;
    fit.theta_hat = map.decode(best.x);
    fit.converged = best.converged;
    fit.iterations = total_iterations;
    fit.loglik = loglik_at(fit.theta_hat, x, VolInit::unconditional);
    fit.residuals = garch_filter(fit.theta_hat, x, VolInit::unconditional).innovations;
    return fit;
}

TestResult garch_test(const GarchFit& fit, const WeightConfig& w, StatFamily family) {
    const ScaledResiduals cache = residual_cache(fit.residuals);
    TestResult r;
    if (family == StatFamily::T || family == StatFamily::TGarch) {
        r = t_stat(cache, w);
        r.family = StatFamily::TGarch;
    } else if (family == StatFamily::Ttilde || family == StatFamily::TtildeGarch) {
        r = t_tilde_stat(cache, w);
        r.family = StatFamily::TtildeGarch;
    } else {
        throw BadParameter("garch_test: family must be T or Ttilde");
    }
    return r;
}

TestResult bootstrap_test(const Eigen::MatrixXd& x, const WeightConfig& w, StatFamily family,
                          int m_boot, RngStream& rng, TestSide side, double alpha) {
    if (m_boot < 99) throw BadParameter("bootstrap_test: m_boot must be >= 99");

    const GarchFit fit = qmle_fit(x);
    TestResult observed = garch_test(fit, w, family);
    const bool two_sided = side == TestSide::two && (family == StatFamily::Ttilde ||
                                                     family == StatFamily::TtildeGarch);
    const double obs_rank = two_sided ? std::abs(observed.statistic) : observed.statistic;

    const int n = static_cast<int>(x.rows());
    const AlternativeSpec normal = AlternativeSpec::normal(static_cast<int>(x.cols()));

    int exceed = 0, ok = 0, failed = 0;
    for (int b = 0; b < m_boot; ++b) {
        RngStream sub = rng.child(b + 1);
        try {
            const GarchPath star =
                garch_simulate(fit.theta_hat, n, kResampleBurnIn, normal, sub);
            const GarchFit refit = qmle_fit(star.x);
            const TestResult t_star = garch_test(refit, w, family);
            const double rank = two_sided ? std::abs(t_star.statistic) : t_star.statistic;
            if (rank >= obs_rank) ++exceed;
            ++ok;
        } catch (const Error&) {
            if (++failed > m_boot / 20)
                throw BootstrapUnstable("bootstrap_test: more than 5% of replicates failed");
        }
    }

    Decision dec;
    dec.alpha = alpha;
    dec.p_value = static_cast<double>(1 + exceed) / (ok + 1);
    dec.reject = *dec.p_value <= alpha;
    observed.decision = dec;
    return observed;
}

GarchSpec bivariate_benchmark_spec(double r) {
    GarchSpec s;
    s.b = Eigen::Vector2d(0.1, 0.1);
    s.B1 = Eigen::Matrix2d{{0.3, 0.1}, {0.1, 0.2}};
    s.G1 = Eigen::Matrix2d{{0.2, 0.1}, {0.01, 0.3}};
    s.R = Eigen::Matrix2d{{1.0, r}, {r, 1.0}};
    s.validate();
    return s;
}

GarchSpec trivariate_benchmark_spec(double r) {
    GarchSpec s;
    s.b = Eigen::Vector3d(0.1, 0.1, 0.1);
    s.B1 = Eigen::Matrix3d{{0.3, 0.1, 0.1}, {0.1, 0.2, 0.1}, {0.1, 0.1, 0.1}};
    s.G1 = Eigen::Matrix3d{{0.2, 0.1, 0.01}, {0.01, 0.3, 0.1}, {0.01, 0.01, 0.1}};
    s.R = Eigen::Matrix3d{{1.0, r, r}, {r, 1.0, r}, {r, r, 1.0}};
    s.validate();
    return s;
}

}  // namespace mvnt
