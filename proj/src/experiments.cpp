#include "mvnt/experiments.hpp"

#include <algorithm>
#include <limits>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "mvnt/errors.hpp"
#include "mvnt/parallel.hpp"

namespace mvnt {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string format_num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

// Stream tags keep the per-purpose substream families disjoint.
constexpr std::uint64_t kCriticalTag = 1;
constexpr std::uint64_t kPowerCritTag = 10;
constexpr std::uint64_t kPowerTag = 11;
constexpr std::uint64_t kGarchTag = 20;

double family_statistic(PowerFamily family, const ScaledResiduals& resid, double param, int d) {
    switch (family) {
        case PowerFamily::T:
            return t_stat(resid, {param, d}).scaled;
        case PowerFamily::TtildeOne:
            return t_tilde_stat(resid, {param, d}).statistic;
        case PowerFamily::TtildeTwo:
            return std::abs(t_tilde_stat(resid, {param, d}).statistic);
        case PowerFamily::HW:
            return hw_stat(resid, param).statistic;
    }
    return 0.0;
}

}  // namespace

double upper_quantile(std::vector<double> values, double alpha) {
    if (values.empty()) throw BadParameter("upper_quantile: empty sample");
    std::sort(values.begin(), values.end());
    const long reps = static_cast<long>(values.size());
    const long k = std::max<long>(
        1, static_cast<long>(std::ceil(reps * (1.0 - alpha) - 1e-9)));
    return values[std::min(k, reps) - 1];
}

ExperimentReport critical_table(const std::vector<int>& d_list, const std::vector<int>& n_list,
                                const std::vector<double>& gamma_list,
                                const std::vector<double>& alpha_list, int reps,
                                std::uint64_t master_seed, int threads) {
    if (reps < 1) throw BadParameter("critical_table: reps must be >= 1");
    const auto t0 = Clock::now();
    const int ng = static_cast<int>(gamma_list.size());
    const int ncells = static_cast<int>(d_list.size() * n_list.size());

    // stats[cell] is reps x ng, written by replication index.
    std::vector<Eigen::MatrixXd> stats(ncells, Eigen::MatrixXd::Zero(reps, ng));
    const RngStream base = RngStream(master_seed).child(kCriticalTag);

    parallel_for(static_cast<long>(ncells) * reps, [&](long idx) {
        const int cell = static_cast<int>(idx / reps);
        const int rep = static_cast<int>(idx % reps);
        const int d = d_list[cell / n_list.size()];
        const int n = n_list[cell % n_list.size()];
        RngStream rng = base.child(cell).child(rep);
        const DataMatrix x = sample(AlternativeSpec::normal(d), n, rng);
        const ScaledResiduals resid = scaled_residuals(x);
        for (int gi = 0; gi < ng; ++gi)
            stats[cell](rep, gi) = t_stat(resid, {gamma_list[gi], d}).scaled;
    }, threads);

    ExperimentReport rep;
    rep.kind = ExperimentReport::Kind::critical;
    rep.title = "critical points of (gamma/pi)^(d/2) T_n,gamma under the null";
    rep.master_seed = master_seed;
    rep.replications = reps;
    for (double g : gamma_list) rep.col_labels.push_back(format_num(g));
    rep.values.resize(ncells * alpha_list.size(), ng);

    int row = 0;
    for (int cell = 0; cell < ncells; ++cell) {
        const int d = d_list[cell / n_list.size()];
        const int n = n_list[cell % n_list.size()];
        for (double alpha : alpha_list) {
            rep.row_labels.push_back(std::to_string(d) + "," + std::to_string(n) + "," +
                                     format_num(alpha));
            for (int gi = 0; gi < ng; ++gi) {
                std::vector<double> col(stats[cell].col(gi).data(),
                                        stats[cell].col(gi).data() + reps);
                rep.values(row, gi) = upper_quantile(std::move(col), alpha);
            }
            ++row;
        }
    }
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

ExperimentReport power_table(const std::vector<AlternativeSpec>& alternatives,
                             const std::vector<int>& d_list, int n,
                             const std::vector<double>& params, double alpha, int reps,
                             int crit_reps, PowerFamily family, std::uint64_t master_seed,
                             int threads) {
    if (reps < 1 || crit_reps < 1) throw BadParameter("power_table: reps must be >= 1");
    const auto t0 = Clock::now();
    const int np = static_cast<int>(params.size());
    const int nd = static_cast<int>(d_list.size());
    const int nalt = static_cast<int>(alternatives.size());
    const RngStream base(master_seed);

    // Stage 1: simulated critical points, one set per dimension, samples
    // shared across the parameter grid.
    std::vector<Eigen::MatrixXd> null_stats(nd, Eigen::MatrixXd::Zero(crit_reps, np));
    parallel_for(static_cast<long>(nd) * crit_reps, [&](long idx) {
        const int di = static_cast<int>(idx / crit_reps);
        const int rep = static_cast<int>(idx % crit_reps);
        RngStream rng = base.child(kPowerCritTag).child(di).child(rep);
        const DataMatrix x = sample(AlternativeSpec::normal(d_list[di]), n, rng);
        const ScaledResiduals resid = scaled_residuals(x);
        for (int pi = 0; pi < np; ++pi)
            null_stats[di](rep, pi) = family_statistic(family, resid, params[pi], d_list[di]);
    }, threads);

    Eigen::MatrixXd crit(nd, np);
    for (int di = 0; di < nd; ++di)
        for (int pi = 0; pi < np; ++pi) {
            std::vector<double> col(null_stats[di].col(pi).data(),
                                    null_stats[di].col(pi).data() + crit_reps);
            crit(di, pi) = upper_quantile(std::move(col), alpha);
        }

    // Stage 2: rejection counts under the alternatives.
    std::vector<Eigen::MatrixXd> alt_stats(static_cast<std::size_t>(nalt) * nd,
                                           Eigen::MatrixXd::Zero(reps, np));
    parallel_for(static_cast<long>(nalt) * nd * reps, [&](long idx) {
        const int rep = static_cast<int>(idx % reps);
        const int di = static_cast<int>((idx / reps) % nd);
        const int ai = static_cast<int>(idx / (static_cast<long>(reps) * nd));
        RngStream rng = base.child(kPowerTag).child(ai).child(di).child(rep);
        const AlternativeSpec alt = alternatives[ai].with_dimension(d_list[di]);
        const DataMatrix x = sample(alt, n, rng);
        const ScaledResiduals resid = scaled_residuals(x);
        for (int pi = 0; pi < np; ++pi)
            alt_stats[ai * nd + di](rep, pi) =
                family_statistic(family, resid, params[pi], d_list[di]);
    }, threads);

    ExperimentReport rep;
    rep.kind = ExperimentReport::Kind::power;
    rep.title = "rejection percentage at alpha = " + format_num(alpha) + ", n = " +
                std::to_string(n);
    rep.master_seed = master_seed;
    rep.replications = reps;
    for (double p : params) rep.col_labels.push_back(format_num(p));
    rep.values.resize(nalt * nd, np);
    for (int ai = 0; ai < nalt; ++ai)
        for (int di = 0; di < nd; ++di) {
            rep.row_labels.push_back(alternatives[ai].to_string() + "," +
                                     std::to_string(d_list[di]));
            for (int pi = 0; pi < np; ++pi) {
                const auto& col = alt_stats[ai * nd + di].col(pi);
                const double exceed =
                    (col.array() > crit(di, pi)).cast<double>().sum();
                rep.values(ai * nd + di, pi) = 100.0 * exceed / reps;
            }
        }
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

ExperimentReport warp_speed_garch(const GarchSpec& spec,
                                  const std::vector<AlternativeSpec>& alternatives, int n,
                                  const std::vector<double>& gamma_list, double alpha,
                                  int mc_reps, std::uint64_t master_seed, int threads) {
    if (mc_reps < 1) throw BadParameter("warp_speed_garch: mc_reps must be >= 1");
    spec.validate();
    const auto t0 = Clock::now();
    const int ng = static_cast<int>(gamma_list.size());
    const int nalt = static_cast<int>(alternatives.size());
    const int d = spec.d();
    constexpr int kBurnIn = 500;

    ExperimentReport rep;
    rep.kind = ExperimentReport::Kind::garch;
    rep.title = "warp-speed rejection percentage of the GARCH Ttilde test, n = " +
                std::to_string(n) + ", alpha = " + format_num(alpha);
    rep.master_seed = master_seed;
    rep.replications = mc_reps;
    for (double g : gamma_list) rep.col_labels.push_back(format_num(g));
    rep.values.resize(nalt, ng);

    const RngStream base = RngStream(master_seed).child(kGarchTag);
    const AlternativeSpec normal = AlternativeSpec::normal(d);

    for (int ai = 0; ai < nalt; ++ai) {
        const AlternativeSpec innovation = alternatives[ai].with_dimension(d);
        rep.row_labels.push_back(innovation.to_string());

        Eigen::MatrixXd stat(mc_reps, ng), stat_star(mc_reps, ng);
        std::vector<char> ok(mc_reps, 0);

        parallel_for(mc_reps, [&](long r) {
            RngStream rng = base.child(ai).child(r);
            try {
                RngStream sim_rng = rng.child(0);
                const GarchPath path = garch_simulate(spec, n, kBurnIn, innovation, sim_rng);
                const GarchFit fit = qmle_fit(path.x);
                RngStream boot_rng = rng.child(1);
                const GarchPath star =
                    garch_simulate(fit.theta_hat, n, kBurnIn, normal, boot_rng);
                const GarchFit refit = qmle_fit(star.x);
                for (int gi = 0; gi < ng; ++gi) {
                    const WeightConfig w{gamma_list[gi], d};
                    stat(r, gi) = garch_test(fit, w, StatFamily::Ttilde).statistic;
                    stat_star(r, gi) = garch_test(refit, w, StatFamily::Ttilde).statistic;
                }
                ok[r] = 1;
            } catch (const Error&) {
                ok[r] = 0;
            }
        }, threads);

        long good = std::count(ok.begin(), ok.end(), 1);
        if (mc_reps - good > mc_reps / 20)
            throw BootstrapUnstable("warp_speed_garch: more than 5% of replicates failed");

        for (int gi = 0; gi < ng; ++gi) {
            std::vector<double> pool;
            pool.reserve(good);
            for (int r = 0; r < mc_reps; ++r)
                if (ok[r]) pool.push_back(stat_star(r, gi));
            // a level-0 test never rejects
            const double crit = alpha <= 0.0
                                    ? std::numeric_limits<double>::infinity()
                                    : upper_quantile(std::move(pool), alpha);
            long reject = 0;
            for (int r = 0; r < mc_reps; ++r)
                if (ok[r] && stat(r, gi) > crit) ++reject;
            rep.values(ai, gi) = 100.0 * static_cast<double>(reject) / good;
        }
    }
    rep.wall_seconds = seconds_since(t0);
    return rep;
}

std::string ExperimentReport::to_text() const {
    std::ostringstream os;
    os << title << "\n";
    os << "replications = " << replications << ", seed = " << master_seed << "\n\n";
    std::size_t label_w = 8;
    for (const auto& l : row_labels) label_w = std::max(label_w, l.size() + 2);
    os << std::left << std::setw(static_cast<int>(label_w)) << "";
    for (const auto& c : col_labels) os << std::right << std::setw(10) << c;
    os << "\n";
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        os << std::left << std::setw(static_cast<int>(label_w)) << row_labels[i];
        for (Eigen::Index j = 0; j < values.cols(); ++j)
            os << std::right << std::setw(10) << std::fixed << std::setprecision(2)
               << values(i, j);
        os << "\n";
        os.unsetf(std::ios::fixed);
    }
    return os.str();
}

std::string ExperimentReport::to_csv() const {
    std::ostringstream os;
    const char* headers[] = {"d,n,alpha", "alternative,d", "alternative"};
    os << headers[static_cast<int>(kind)];
    for (const auto& c : col_labels) os << ',' << c;
    os << '\n';
    os << std::setprecision(12);
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        os << row_labels[i];
        for (Eigen::Index j = 0; j < values.cols(); ++j) os << ',' << values(i, j);
        os << '\n';
    }
    return os.str();
}

std::string ExperimentReport::to_json() const {
    nlohmann::json j;
    const char* kinds[] = {"critical_table", "power_table", "garch_table"};
    j["schema"] = "mvnt/1";
    j["kind"] = kinds[static_cast<int>(kind)];
    j["title"] = title;
    j["rows"] = row_labels;
    j["columns"] = col_labels;
    std::vector<std::vector<double>> vals;
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        vals.emplace_back();
        for (Eigen::Index k = 0; k < values.cols(); ++k) vals.back().push_back(values(i, k));
    }
    j["values"] = vals;
    j["replications"] = replications;
    j["master_seed"] = master_seed;
    j["wall_seconds"] = wall_seconds;
    return j.dump(2);
}

}  // namespace mvnt
