// Acceptance suite: runs every exit criterion at its stated tolerance and
// prints one pass/fail line per criterion.  Returns nonzero if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wfexact/selftest.hpp"

namespace fs = std::filesystem;

namespace {

struct Criterion {
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

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

int run(const std::string& cmd_args, const fs::path& stdout_path) {
    std::string cmd = std::string(WF_CLI_PATH) + " " + cmd_args + " >" + stdout_path.string() +
                      " 2>/dev/null";
    int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

// Criterion 9: byte-identical CLI outputs across repeated runs and across
// thread counts, for every subcommand.
Criterion cli_determinism() {
    Criterion c{"CLI byte-determinism across runs and thread counts", true, "", 0.0};
    fs::path dir = fs::temp_directory_path() / "wf_acceptance";
    fs::create_directories(dir);
    spit(dir / "bench.cfg",
         "model = haploid\n"
         "theta_a = 0.02\n"
         "theta_A = 0.02\n"
         "theta = 0.7\n"
         "theta_bound = 1\n"
         "n_obs = 20\n"
         "dt = 1\n"
         "N = 32\n"
         "seed = 11\n"
         "approx_small_t = 1\n");
    std::string cfg = " --config " + (dir / "bench.cfg").string();

    fs::path wd_a = dir / "run_a", wd_b = dir / "run_b";
    fs::create_directories(wd_a);
    fs::create_directories(wd_b);
    auto run_in = [&](const fs::path& wd, const std::string& args, const fs::path& out) {
        std::string cmd = "cd " + wd.string() + " && " + std::string(WF_CLI_PATH) + " " + args +
                          " >" + out.string() + " 2>/dev/null";
        int rc = std::system(cmd.c_str());
        return rc < 0 ? rc : WEXITSTATUS(rc);
    };

    // identical relative outputs in two working directories, thread counts
    // 1 vs 8; every artifact and every stdout byte must match
    auto compare = [&](const std::string& label, const std::string& args,
                       const std::string& out_file) {
        int ra = run_in(wd_a, args + " --threads 1", dir / (label + "_a.stdout"));
        int rb = run_in(wd_b, args + " --threads 8", dir / (label + "_b.stdout"));
        bool same = (ra == rb) && slurp(wd_a / out_file) == slurp(wd_b / out_file) &&
                    slurp(dir / (label + "_a.stdout")) == slurp(dir / (label + "_b.stdout"));
        if (!same) {
            c.pass = false;
            c.detail += label + " differs; ";
        }
    };

    compare("simulate", "simulate" + cfg + " --out data.csv", "data.csv");
    compare("estimate", "estimate" + cfg + " --data data.csv --out est.json", "est.json");
    compare("loglik-grid",
            "loglik-grid" + cfg +
                " --data data.csv --set grid_points=21 --set grid_lo=-0.9 --set grid_hi=0.9 "
                "--out grid.csv",
            "grid.csv");
    compare("bootstrap",
            "bootstrap" + cfg + " --data data.csv --set bootstrap_B=8 --out boot.json",
            "boot.json");

    // selftest quick, stdout only
    int r1 = run("selftest --level quick --threads 1", dir / "st1.stdout");
    int r2 = run("selftest --level quick --threads 8", dir / "st2.stdout");
    if (r1 != r2 || slurp(dir / "st1.stdout") != slurp(dir / "st2.stdout")) {
        c.pass = false;
        c.detail += "selftest differs; ";
    }
    if (c.pass) c.detail = "simulate/estimate/loglik-grid/bootstrap/selftest all byte-identical";
    return c;
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    int threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 4;

    std::vector<std::pair<std::string, wf::selftest::CheckResult (*)()>> dummy;
    std::vector<Criterion> results;

    auto timed = [&](const char* label, auto&& fn) {
        auto t0 = clock::now();
        wf::selftest::CheckResult r = fn();
        double sec = std::chrono::duration<double>(clock::now() - t0).count();
        results.push_back({std::string(label) + ": " + r.name, r.pass, r.detail, sec});
    };

    timed("1", [&] { return wf::selftest::block_sampler_exactness(true); });
    timed("2", [&] { return wf::selftest::density_unbiasedness(true); });
    timed("3", [&] { return wf::selftest::bridge_marginal_law(true); });
    timed("4", [&] { return wf::selftest::girsanov_unit_mass(true, threads); });
    timed("5", [&] { return wf::selftest::neutral_reduction(); });
    timed("6", [&] { return wf::selftest::benchmark_trend(true, threads); });
    timed("7", [&] { return wf::selftest::coupled_factorization(true, threads); });
    timed("8", [&] { return wf::selftest::sam_continuity(true, threads); });
    {
        auto t0 = clock::now();
        Criterion c = cli_determinism();
        c.seconds = std::chrono::duration<double>(clock::now() - t0).count();
        c.name = "9: " + c.name;
        results.push_back(c);
    }

    bool all = true;
    for (const auto& r : results) {
        std::printf("[%s] criterion %s - %s (%.1fs)\n", r.pass ? "PASS" : "FAIL",
                    r.name.c_str(), r.detail.c_str(), r.seconds);
        all &= r.pass;
    }
    std::printf("%s\n", all ? "acceptance: all criteria passed"
                            : "acceptance: FAILURES listed above");
    return all ? 0 : 1;
}
