// mvnt: multivariate normality tests from the joint empirical cosine
// transform and moment generating function, for i.i.d. data and CCC-GARCH
// innovations. CSV in, JSON/CSV out.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvnt/csv.hpp"
#include "mvnt/errors.hpp"
#include "mvnt/experiments.hpp"
#include "mvnt/garch.hpp"
#include "mvnt/parallel.hpp"
#include "mvnt/quadrature.hpp"

using nlohmann::json;

namespace {

constexpr const char* kSchema = "mvnt/1";

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const mvnt::DataError*>(&e)) return 2;
    if (dynamic_cast<const mvnt::NumericError*>(&e)) return 3;
    return 3;
}

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << std::endl;
    } else {
        std::ofstream out(out_path);
        if (!out) throw mvnt::DataError("cannot open '" + out_path + "' for writing");
        out << j.dump(2) << std::endl;
    }
}

void write_report(const mvnt::ExperimentReport& rep, const std::string& out_prefix) {
    if (out_prefix.empty()) {
        std::cout << rep.to_text();
        return;
    }
    std::ofstream(out_prefix + ".csv") << rep.to_csv();
    std::ofstream(out_prefix + ".txt") << rep.to_text();
    std::ofstream(out_prefix + ".json") << rep.to_json();
    std::cout << rep.to_text();
    std::cout << "written: " << out_prefix << ".{csv,txt,json}\n";
}

json result_to_json(const mvnt::TestResult& r) {
    static const char* names[] = {"t", "ttilde", "hw", "t_garch", "ttilde_garch"};
    json j;
    j["schema"] = kSchema;
    j["family"] = names[static_cast<int>(r.family)];
    j["statistic"] = r.statistic;
    if (std::isfinite(r.scaled)) j["scaled"] = r.scaled;
    j[r.family == mvnt::StatFamily::HW ? "beta" : "gamma"] = r.gamma_or_beta;
    j["n"] = r.n;
    j["d"] = r.d;
    if (r.decision) {
        j["alpha"] = r.decision->alpha;
        j["reject"] = r.decision->reject;
        if (r.decision->critical_value) j["critical_value"] = *r.decision->critical_value;
        if (r.decision->p_value) j["p_value"] = *r.decision->p_value;
    }
    return j;
}

std::vector<mvnt::AlternativeSpec> parse_alternatives(const std::vector<std::string>& names) {
    std::vector<mvnt::AlternativeSpec> alts;
    for (const auto& a : names) alts.push_back(mvnt::AlternativeSpec::parse(a, 1));
    return alts;
}

struct TestCmd {
    std::string input;
    bool header = false;
    std::string stat = "t";
    double gamma = 2.0;
    double beta = 1.0;
    double alpha = 0.05;
    std::string side = "one";
    std::uint64_t seed = 20240601;
    int null_reps = 2000;
    std::optional<double> critical;
    std::string out;
};

// Null-simulated p-value and critical point for an i.i.d. statistic: no
// closed-form null distribution exists, so the null is re-simulated at the
// observed (n, d).
void run_test(const TestCmd& c, int threads) {
    const mvnt::DataMatrix x = mvnt::read_csv_file(c.input, c.header);
    const mvnt::ScaledResiduals resid = mvnt::scaled_residuals(x);
    const int n = resid.n(), d = resid.d();

    mvnt::TestResult r;
    const bool two_sided = c.side == "two";
    const auto stat_of = [&](const mvnt::ScaledResiduals& rs) -> double {
        if (c.stat == "t") return mvnt::t_stat(rs, {c.gamma, d}).scaled;
        if (c.stat == "ttilde") {
            const double v = mvnt::t_tilde_stat(rs, {c.gamma, d}).statistic;
            return two_sided ? std::abs(v) : v;
        }
        return mvnt::hw_stat(rs, c.beta).statistic;
    };
    if (c.stat == "t")
        r = mvnt::t_stat(resid, {c.gamma, d});
    else if (c.stat == "ttilde")
        r = mvnt::t_tilde_stat(resid, {c.gamma, d});
    else if (c.stat == "hw")
        r = mvnt::hw_stat(resid, c.beta);
    else
        throw CLI::ValidationError("--stat must be t, ttilde or hw");

    const double observed = stat_of(resid);
    mvnt::Decision dec;
    dec.alpha = c.alpha;
    if (c.critical) {
        dec.critical_value = *c.critical;
        dec.reject = observed > *c.critical;
    } else {
        std::vector<double> null_stats(c.null_reps);
        const mvnt::RngStream base = mvnt::RngStream(c.seed).child(0xAB);
        mvnt::parallel_for(c.null_reps, [&](long i) {
            mvnt::RngStream rng = base.child(i);
            const mvnt::DataMatrix xn = mvnt::sample(mvnt::AlternativeSpec::normal(d), n, rng);
            null_stats[i] = stat_of(mvnt::scaled_residuals(xn));
        }, threads);
        int exceed = 0;
        for (double v : null_stats) exceed += v >= observed;
        dec.p_value = static_cast<double>(1 + exceed) / (c.null_reps + 1);
        dec.critical_value = mvnt::upper_quantile(null_stats, c.alpha);
        dec.reject = *dec.p_value <= c.alpha;
    }
    r.decision = dec;
    emit(result_to_json(r), c.out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CF x MGF tests of multivariate normality (i.i.d. and GARCH innovations)"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker threads (0 = hardware)");

    // ---- test ----
    TestCmd tc;
    auto* test = app.add_subcommand("test", "test a CSV dataset for multivariate normality");
    test->add_option("input", tc.input, "CSV file, one observation per row")->required();
    test->add_flag("--header", tc.header, "skip a header line");
    test->add_option("--stat", tc.stat, "statistic: t, ttilde or hw")->default_val("t");
    test->add_option("--gamma", tc.gamma, "weight parameter")->default_val(2.0);
    test->add_option("--beta", tc.beta, "HW smoothing parameter")->default_val(1.0);
    test->add_option("--alpha", tc.alpha, "significance level")->default_val(0.05);
    test->add_option("--side", tc.side, "ttilde sidedness: one or two")->default_val("one");
    test->add_option("--seed", tc.seed, "seed for the null simulation");
    test->add_option("--null-reps", tc.null_reps, "null simulation replications")
        ->default_val(2000);
    double crit_in = 0.0;
    auto* crit_opt = test->add_option("--critical", crit_in,
                                      "use this critical value instead of simulating");
    test->add_option("--out", tc.out, "write the JSON result here instead of stdout");

    // ---- constants ----
    double cg = 2.0;
    int cd = 1;
    std::string cout_path;
    auto* constants = app.add_subcommand("constants", "asymptotic constants for (gamma, d)");
    constants->add_option("--gamma", cg)->default_val(2.0);
    constants->add_option("--d", cd)->default_val(1);
    constants->add_option("--out", cout_path);

    // ---- simulate ----
    std::string sim_dist = "n";
    int sim_n = 100, sim_d = 2, sim_burn = 500;
    std::uint64_t sim_seed = 0;
    std::string sim_out, sim_garch_spec;
    auto* simulate = app.add_subcommand("simulate", "draw a sample (i.i.d. or GARCH path)");
    simulate->add_option("--dist", sim_dist,
                         "n | la | t:nu | gn:theta | ase:alpha | pii:a | cube | aep[:a:p1:p2]");
    simulate->add_option("--n", sim_n)->default_val(100);
    simulate->add_option("--d", sim_d)->default_val(2);
    simulate->add_option("--seed", sim_seed)->required();
    simulate->add_option("--garch-spec", sim_garch_spec,
                         "JSON GarchSpec file; simulates a path driven by --dist innovations");
    simulate->add_option("--burn-in", sim_burn)->default_val(500);
    simulate->add_option("--out", sim_out, "output CSV (default stdout)");

    // ---- fit ----
    std::string fit_input, fit_out;
    bool fit_header = false;
    auto* fit_cmd = app.add_subcommand("fit", "CCC-GARCH(1,1) quasi maximum likelihood fit");
    fit_cmd->add_option("input", fit_input)->required();
    fit_cmd->add_flag("--header", fit_header);
    fit_cmd->add_option("--out", fit_out);

    // ---- garch-test ----
    std::string gt_input, gt_out;
    bool gt_header = false;
    double gt_gamma = 2.0, gt_alpha = 0.05;
    int gt_mboot = 500;
    std::string gt_family = "ttilde", gt_side = "one";
    std::uint64_t gt_seed = 20240601;
    auto* gtest = app.add_subcommand("garch-test",
                                     "bootstrap test of Gaussian GARCH innovations");
    gtest->add_option("input", gt_input)->required();
    gtest->add_flag("--header", gt_header);
    gtest->add_option("--gamma", gt_gamma)->default_val(2.0);
    gtest->add_option("--alpha", gt_alpha)->default_val(0.05);
    gtest->add_option("--mboot", gt_mboot, "bootstrap replications (>= 99)")->default_val(500);
    gtest->add_option("--family", gt_family, "t or ttilde")->default_val("ttilde");
    gtest->add_option("--side", gt_side, "one or two")->default_val("one");
    gtest->add_option("--seed", gt_seed);
    gtest->add_option("--out", gt_out);

    // ---- table1 ----
    std::vector<int> t1_d{2}, t1_n{20, 50};
    std::vector<double> t1_gamma{1.5, 2.0, 2.5}, t1_alpha{0.05, 0.10};
    int t1_reps = 2000;
    bool t1_full = false;
    std::uint64_t t1_seed = 0;
    std::string t1_out;
    auto* table1 = app.add_subcommand("table1", "critical-point table under the null");
    table1->add_option("--d", t1_d);
    table1->add_option("--n", t1_n);
    table1->add_option("--gamma", t1_gamma);
    table1->add_option("--alpha", t1_alpha);
    table1->add_option("--reps", t1_reps)->default_val(2000);
    table1->add_flag("--full", t1_full, "paper-scale replication count (10000)");
    table1->add_option("--seed", t1_seed)->required();
    table1->add_option("--out", t1_out, "output path prefix");

    // ---- power ----
    std::vector<std::string> pw_alt{"la"};
    std::vector<int> pw_d{2};
    int pw_n = 50, pw_reps = 500, pw_crit_reps = 2000;
    std::vector<double> pw_params{2.0};
    double pw_alpha = 0.05;
    std::string pw_family = "t", pw_out;
    bool pw_full = false;
    std::uint64_t pw_seed = 0;
    auto* power = app.add_subcommand("power", "power table against alternatives");
    power->add_option("--alt", pw_alt, "alternative specs (la, t:5, gn:1.5, ...)");
    power->add_option("--d", pw_d);
    power->add_option("--n", pw_n)->default_val(50);
    power->add_option("--param", pw_params, "gamma grid (beta grid for --family hw)");
    power->add_option("--alpha", pw_alpha)->default_val(0.05);
    power->add_option("--reps", pw_reps)->default_val(500);
    power->add_option("--crit-reps", pw_crit_reps)->default_val(2000);
    power->add_option("--family", pw_family, "t | ttilde-one | ttilde-two | hw")
        ->default_val("t");
    power->add_flag("--full", pw_full, "paper-scale counts (1000 power / 10000 critical)");
    power->add_option("--seed", pw_seed)->required();
    power->add_option("--out", pw_out);

    // ---- garch-table ----
    std::vector<std::string> ga_alt{"n"};
    int ga_n = 300, ga_reps = 2000, ga_d = 2;
    double ga_r = 0.0, ga_alpha = 0.05;
    std::vector<double> ga_gamma{1.2};
    std::string ga_spec_file, ga_out;
    bool ga_full = false;
    std::uint64_t ga_seed = 0;
    auto* gtable = app.add_subcommand("garch-table",
                                      "warp-speed GARCH level/power table");
    gtable->add_option("--alt", ga_alt, "innovation distributions");
    gtable->add_option("--n", ga_n)->default_val(300);
    gtable->add_option("--d", ga_d, "2 or 3 selects the benchmark spec")->default_val(2);
    gtable->add_option("--r", ga_r, "benchmark correlation")->default_val(0.0);
    gtable->add_option("--spec", ga_spec_file, "JSON GarchSpec file (overrides --d/--r)");
    gtable->add_option("--gamma", ga_gamma);
    gtable->add_option("--alpha", ga_alpha)->default_val(0.05);
    gtable->add_option("--reps", ga_reps)->default_val(2000);
    gtable->add_flag("--full", ga_full, "paper-scale Monte Carlo count (10000)");
    gtable->add_option("--seed", ga_seed)->required();
    gtable->add_option("--out", ga_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 1;
    }

    try {
        if (*test) {
            if (*crit_opt) tc.critical = crit_in;
            run_test(tc, threads);
        } else if (*constants) {
            json j;
            j["schema"] = kSchema;
            j["gamma"] = cg;
            j["d"] = cd;
            j["sigma2"] = mvnt::sigma2_closed({cg, cd});
            j["mean_w_norm"] = mvnt::mean_w_norm({cg, cd});
            emit(j, cout_path);
        } else if (*simulate) {
            mvnt::RngStream rng(sim_seed);
            const mvnt::AlternativeSpec dist = mvnt::AlternativeSpec::parse(sim_dist, sim_d);
            Eigen::MatrixXd out;
            if (sim_garch_spec.empty()) {
                out = mvnt::sample(dist, sim_n, rng);
            } else {
                std::ifstream in(sim_garch_spec);
                if (!in) throw mvnt::DataError("cannot open '" + sim_garch_spec + "'");
                const std::string text((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
                const mvnt::GarchSpec spec = mvnt::GarchSpec::from_json(text);
                out = mvnt::garch_simulate(spec, sim_n, sim_burn,
                                           dist.with_dimension(spec.d()), rng)
                          .x;
            }
            if (sim_out.empty())
                mvnt::write_csv(std::cout, out);
            else
                mvnt::write_csv_file(sim_out, out);
        } else if (*fit_cmd) {
            const mvnt::DataMatrix x = mvnt::read_csv_file(fit_input, fit_header);
            const mvnt::GarchFit fit = mvnt::qmle_fit(x);
            json j = json::parse(fit.theta_hat.to_json());
            j["schema"] = kSchema;
            j["loglik"] = fit.loglik;
            j["converged"] = fit.converged;
            j["iterations"] = fit.iterations;
            emit(j, fit_out);
        } else if (*gtest) {
            const mvnt::DataMatrix x = mvnt::read_csv_file(gt_input, gt_header);
            const int d = static_cast<int>(x.cols());
            const mvnt::StatFamily family =
                gt_family == "t" ? mvnt::StatFamily::TGarch : mvnt::StatFamily::TtildeGarch;
            const mvnt::TestSide side =
                gt_side == "two" ? mvnt::TestSide::two : mvnt::TestSide::one;
            mvnt::RngStream rng(gt_seed);
            const mvnt::TestResult r = mvnt::bootstrap_test(x, {gt_gamma, d}, family,
                                                            gt_mboot, rng, side, gt_alpha);
            emit(result_to_json(r), gt_out);
        } else if (*table1) {
            if (t1_full) t1_reps = 10000;
            const auto rep =
                mvnt::critical_table(t1_d, t1_n, t1_gamma, t1_alpha, t1_reps, t1_seed, threads);
            write_report(rep, t1_out);
        } else if (*power) {
            if (pw_full) {
                pw_reps = 1000;
                pw_crit_reps = 10000;
            }
            mvnt::PowerFamily family;
            if (pw_family == "t")
                family = mvnt::PowerFamily::T;
            else if (pw_family == "ttilde-one")
                family = mvnt::PowerFamily::TtildeOne;
            else if (pw_family == "ttilde-two")
                family = mvnt::PowerFamily::TtildeTwo;
            else if (pw_family == "hw")
                family = mvnt::PowerFamily::HW;
            else
                throw CLI::ValidationError("--family must be t, ttilde-one, ttilde-two or hw");
            const auto rep = mvnt::power_table(parse_alternatives(pw_alt), pw_d, pw_n,
                                               pw_params, pw_alpha, pw_reps, pw_crit_reps,
                                               family, pw_seed, threads);
            write_report(rep, pw_out);
        } else if (*gtable) {
            if (ga_full) ga_reps = 10000;
            mvnt::GarchSpec spec;
            if (!ga_spec_file.empty()) {
                std::ifstream in(ga_spec_file);
                if (!in) throw mvnt::DataError("cannot open '" + ga_spec_file + "'");
                const std::string text((std::istreambuf_iterator<char>(in)),
                                       std::istreambuf_iterator<char>());
                spec = mvnt::GarchSpec::from_json(text);
            } else if (ga_d == 2) {
                spec = mvnt::bivariate_benchmark_spec(ga_r);
            } else if (ga_d == 3) {
                spec = mvnt::trivariate_benchmark_spec(ga_r);
            } else {
                throw CLI::ValidationError("--d must be 2 or 3 without --spec");
            }
            const auto rep = mvnt::warp_speed_garch(spec, parse_alternatives(ga_alt), ga_n,
                                                    ga_gamma, ga_alpha, ga_reps, ga_seed,
                                                    threads);
            write_report(rep, ga_out);
        }
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}
