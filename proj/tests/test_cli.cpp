#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wfexact/config.hpp"
#include "wfexact/io.hpp"

using namespace wf;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
    fs::path p = fs::temp_directory_path() / "wf_cli_tests";
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

int run_cli(const std::string& args) {
    std::string cmd = std::string(WF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

int run_cli_capture(const std::string& args, const fs::path& stdout_path) {
    std::string cmd = std::string(WF_CLI_PATH) + " " + args + " >" + stdout_path.string() +
                      " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("config parsing: diagnostics carry file, line, and key") {
    fs::path dir = temp_dir();
    spit(dir / "bad1.cfg", "theta_a 0.02\n");
    CHECK_THROWS_WITH_AS(RunConfig::from_file((dir / "bad1.cfg").string()),
                         doctest::Contains("expected key = value"), ConfigError);
    spit(dir / "bad2.cfg", "theta_a = abc\n");
    RunConfig cfg = RunConfig::from_file((dir / "bad2.cfg").string());
    CHECK_THROWS_WITH_AS(cfg.get_double("theta_a", 0.0), doctest::Contains("theta_a"),
                         ConfigError);
    spit(dir / "ok.cfg", "theta_a = 0.02  # trailing comment\nx0 = 0.1 0.9\n");
    RunConfig ok = RunConfig::from_file((dir / "ok.cfg").string());
    CHECK(ok.get_double("theta_a", 0.0) == 0.02);
    CHECK(ok.get_vector("x0") == std::vector<double>{0.1, 0.9});
    CHECK_THROWS_AS(ok.require_string("data"), ConfigError);
}

TEST_CASE("series CSV round trip and row-numbered errors") {
    fs::path dir = temp_dir();
    ObservationSeries s;
    s.loci = 2;
    s.times = {0.0, 1.0, 2.5};
    s.values = {0.5, 0.25, 0.125, 1e-120, 0.625, 0.4375};
    fs::path p = dir / "series.csv";
    write_series_csv(p.string(), s, {{"note", "test"}});
    ObservationSeries r = read_series_csv(p.string());
    CHECK(r.loci == 2);
    CHECK(r.times == s.times);
    CHECK(r.values == s.values);  // 17-digit round trip is exact

    spit(dir / "bad_boundary.csv", "time,x1\n0,0.5\n1,1\n");
    CHECK_THROWS_WITH_AS(read_series_csv((dir / "bad_boundary.csv").string()),
                         doctest::Contains(":3"), DataError);
    spit(dir / "bad_cell.csv", "time,x1\n0,0.5\n1,zz\n");
    CHECK_THROWS_WITH_AS(read_series_csv((dir / "bad_cell.csv").string()),
                         doctest::Contains(":3"), DataError);
}

TEST_CASE("cli: simulate/estimate/grid/bootstrap round trip, determinism, env seed") {
    fs::path dir = temp_dir();
    spit(dir / "bench.cfg",
         "model = haploid\n"
         "theta_a = 0.02\n"
         "theta_A = 0.02\n"
         "theta = 0.7\n"
         "theta_bound = 1\n"
         "n_obs = 4\n"
         "dt = 1\n"
         "N = 4\n"
         "seed = 5\n"
         "approx_small_t = 1\n"
         "threads = 2\n");
    std::string cfg = " --config " + (dir / "bench.cfg").string();

    // simulate twice in separate working directories with the same relative
    // output name: files and stdout must match byte for byte
    fs::path run_a = dir / "run_a", run_b = dir / "run_b";
    fs::create_directories(run_a);
    fs::create_directories(run_b);
    auto run_in = [&](const fs::path& wd, const std::string& args, const fs::path& out) {
        std::string cmd = "cd " + wd.string() + " && " + std::string(WF_CLI_PATH) + " " + args +
                          " >" + out.string() + " 2>/dev/null";
        int rc = std::system(cmd.c_str());
        return rc < 0 ? rc : WEXITSTATUS(rc);
    };
    CHECK(run_in(run_a, "simulate" + cfg + " --out data.csv", dir / "s1.out") == 0);
    CHECK(run_in(run_b, "simulate" + cfg + " --out data.csv", dir / "s2.out") == 0);
    CHECK(slurp(run_a / "data.csv") == slurp(run_b / "data.csv"));
    CHECK(slurp(dir / "s1.out") == slurp(dir / "s2.out"));
    fs::path data1 = run_a / "data.csv";

    // estimate: valid JSON with the promised fields; deterministic
    fs::path est = dir / "est.json";
    int rc = run_cli("estimate" + cfg + " --data " + data1.string() + " --out " + est.string());
    CHECK(rc == 0);
    nlohmann::json j = nlohmann::json::parse(slurp(est));
    CHECK(j.contains("theta_hat"));
    CHECK(j.contains("log_lik"));
    CHECK(j.contains("converged"));
    CHECK(j.contains("version"));
    CHECK(j.contains("config"));
    CHECK(j["N"] == 4);
    CHECK(j["seed"] == 5);
    double hat = j["theta_hat"][0];
    CHECK(hat >= -1.0);
    CHECK(hat <= 1.0);

    fs::path est2 = dir / "est2.json";
    run_cli("estimate" + cfg + " --data " + data1.string() + " --out " + est2.string());
    nlohmann::json j2 = nlohmann::json::parse(slurp(est2));
    CHECK(j["theta_hat"] == j2["theta_hat"]);

    // WF_SEED environment override wins over config and flags
    fs::path est3 = dir / "est3.json";
    std::string cmd = "WF_SEED=77 " + std::string(WF_CLI_PATH) + " estimate" + cfg + " --data " +
                      data1.string() + " --out " + est3.string() + " >/dev/null 2>&1";
    std::system(cmd.c_str());
    nlohmann::json j3 = nlohmann::json::parse(slurp(est3));
    CHECK(j3["seed"] == 77);

    // loglik-grid smoke: 3 points, header + rows
    fs::path grid = dir / "grid.csv";
    CHECK(run_cli("loglik-grid" + cfg + " --data " + data1.string() + " --out " + grid.string() +
                  " --set grid_points=3 --set grid_lo=-0.5 --set grid_hi=0.5") == 0);
    std::string gtxt = slurp(grid);
    CHECK(gtxt.find("theta1,log_lik") != std::string::npos);

    // bootstrap smoke with B = 2
    fs::path boot = dir / "boot.json";
    CHECK(run_cli("bootstrap" + cfg + " --data " + data1.string() + " --out " + boot.string() +
                  " --set bootstrap_B=2") == 0);
    nlohmann::json jb = nlohmann::json::parse(slurp(boot));
    CHECK(jb["B"] == 2);
    CHECK(jb["unit"] == "samples");
    CHECK(jb["replicates"].size() == 2);

    // draw cache round trip through the CLI: identical estimates
    fs::path cache = dir / "draws.json";
    fs::path est4 = dir / "est4.json", est5 = dir / "est5.json";
    CHECK(run_cli("estimate" + cfg + " --data " + data1.string() + " --out " + est4.string() +
                  " --cache " + cache.string()) == 0);
    CHECK(fs::exists(cache));
    CHECK(run_cli("estimate" + cfg + " --data " + data1.string() + " --out " + est5.string() +
                  " --cache " + cache.string()) == 0);
    CHECK(nlohmann::json::parse(slurp(est4))["theta_hat"] ==
          nlohmann::json::parse(slurp(est5))["theta_hat"]);

    // exit codes: config error 2, data error 3
    CHECK(run_cli("estimate --data " + data1.string()) == 2);  // no config/model keys
    spit(dir / "bad.csv", "time,x1\n0,0.5\n1,1\n");
    CHECK(run_cli("estimate" + cfg + " --data " + (dir / "bad.csv").string()) == 3);
}
