#include <doctest.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const std::string cmd = std::string(MVNT_CLI_PATH) + " " + args + " 2>/dev/null";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (std::size_t got = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), got);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "mvnt_cli_test";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("constants command prints the closed forms") {
    const RunResult r = run_cli("constants --gamma 2 --d 1");
    CHECK(r.exit_code == 0);
    const json j = json::parse(r.out);
    CHECK(j["schema"] == "mvnt/1");
    CHECK(std::abs(j["sigma2"].get<double>() - 9.23e-3) < 2e-5);
    CHECK(j["mean_w_norm"].is_number());
}

TEST_CASE("simulate then test round trip with a supplied critical value") {
    const fs::path csv = temp_dir() / "normal20x2.csv";
    const RunResult sim =
        run_cli("simulate --dist n --n 20 --d 2 --seed 7 --out " + csv.string());
    CHECK(sim.exit_code == 0);

    const RunResult t = run_cli("test " + csv.string() + " --stat t --gamma 2 --critical 0.80");
    CHECK(t.exit_code == 0);
    const json j = json::parse(t.out);
    CHECK(j["family"] == "t");
    CHECK(j["n"] == 20);
    CHECK(j["d"] == 2);
    CHECK(j["statistic"].get<double>() >= 0.0);
    CHECK(j["critical_value"] == 0.8);
    CHECK(j.contains("reject"));
}

TEST_CASE("test command is reproducible and carries a simulated p-value") {
    const fs::path csv = temp_dir() / "t3_30x2.csv";
    run_cli("simulate --dist t:3 --n 30 --d 2 --seed 99 --out " + csv.string());

    const std::string args =
        "test " + csv.string() + " --stat t --gamma 2 --seed 5 --null-reps 300";
    const RunResult a = run_cli(args);
    const RunResult b = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(a.out == b.out);
    const json j = json::parse(a.out);
    const double p = j["p_value"].get<double>();
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
    CHECK(j["critical_value"].is_number());
}

TEST_CASE("data errors exit with code 2") {
    const fs::path csv = temp_dir() / "toofew.csv";
    std::ofstream(csv) << "1,2,3\n4,5,6\n7,8,9\n";
    CHECK(run_cli("test " + csv.string()).exit_code == 2);
    CHECK(run_cli("test /nonexistent/file.csv").exit_code == 2);
}

TEST_CASE("usage errors exit with code 1") {
    CHECK(run_cli("test").exit_code == 1);
    CHECK(run_cli("--definitely-not-a-flag").exit_code == 1);
    CHECK(run_cli("simulate --dist n --n 5 --d 1").exit_code == 1);  // --seed required
    CHECK(run_cli("table1 --reps 10").exit_code == 1);               // --seed required
}

TEST_CASE("table1 writes csv, txt and json artifacts") {
    const fs::path prefix = temp_dir() / "tbl";
    const RunResult r = run_cli("table1 --d 2 --n 20 --gamma 2.0 --alpha 0.05 --reps 60 --seed 3 --out " +
                                prefix.string());
    CHECK(r.exit_code == 0);
    CHECK(fs::exists(prefix.string() + ".csv"));
    CHECK(fs::exists(prefix.string() + ".txt"));
    CHECK(fs::exists(prefix.string() + ".json"));
    std::ifstream jf(prefix.string() + ".json");
    json j;
    jf >> j;
    CHECK(j["kind"] == "critical_table");
    CHECK(j["replications"] == 60);
}

TEST_CASE("garch fit and bootstrap test commands") {
    const fs::path dir = temp_dir();
    const fs::path spec_path = dir / "spec.json";
    {
        const RunResult fitspec = run_cli("constants --gamma 2 --d 2");  // warm-up no-op
        CHECK(fitspec.exit_code == 0);
    }
    std::ofstream(spec_path) << R"({
      "b": [0.1, 0.1],
      "B1": [[0.3, 0.1], [0.1, 0.2]],
      "G1": [[0.2, 0.1], [0.01, 0.3]],
      "R": [[1.0, 0.0], [0.0, 1.0]]
    })";
    const fs::path path_csv = dir / "garch_path.csv";
    const RunResult sim = run_cli("simulate --dist n --n 150 --d 2 --seed 11 --garch-spec " +
                                  spec_path.string() + " --out " + path_csv.string());
    CHECK(sim.exit_code == 0);

    const RunResult fit = run_cli("fit " + path_csv.string());
    CHECK(fit.exit_code == 0);
    const json jf = json::parse(fit.out);
    CHECK(jf.contains("b"));
    CHECK(jf.contains("loglik"));

    const RunResult gt = run_cli("garch-test " + path_csv.string() +
                                 " --gamma 1.5 --mboot 99 --seed 21");
    CHECK(gt.exit_code == 0);
    const json jt = json::parse(gt.out);
    CHECK(jt["family"] == "ttilde_garch");
    const double p = jt["p_value"].get<double>();
    CHECK(p > 0.0);
    CHECK(p <= 1.0);
}

TEST_SUITE_END();
