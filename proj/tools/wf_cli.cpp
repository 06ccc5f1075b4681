// wf: exact Wright-Fisher diffusion simulation and Monte Carlo maximum
// likelihood estimation of selection parameters.
//
// Subcommands: simulate, estimate, loglik-grid, bootstrap, selftest.
// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "wfexact/version.hpp"

#include "wfexact/config.hpp"
#include "wfexact/coupled.hpp"
#include "wfexact/exactsim.hpp"
#include "wfexact/inference.hpp"
#include "wfexact/io.hpp"
#include "wfexact/selftest.hpp"
#include "wfexact/threading.hpp"

namespace {

using wf::RunConfig;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out;
    std::string data;
    std::string cache;
    long long seed = -1;
    int threads = -1;
    int n_samples = -1;
    bool approx_small_t = false;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool needs_data) {
    cmd->add_option("--config", args.config_path, "flat key = value configuration file");
    cmd->add_option("--set", args.overrides, "override a config key, e.g. --set theta=0.7")
        ->take_all();
    cmd->add_option("--out", args.out, "output file path");
    if (needs_data) cmd->add_option("--data", args.data, "input dataset (CSV)");
    cmd->add_option("--cache", args.cache, "frozen-draw cache file (JSON)");
    cmd->add_option("--seed", args.seed, "master seed");
    cmd->add_option("--threads", args.threads, "worker threads (0 = all cores)");
    cmd->add_option("--N", args.n_samples, "Monte Carlo samples per contribution");
    cmd->add_flag("--approx-small-t", args.approx_small_t,
                  "enable the labeled Gaussian fallback for gaps below t_min");
}

RunConfig load_config(const CommonArgs& args) {
    RunConfig cfg;
    if (!args.config_path.empty()) cfg = RunConfig::from_file(args.config_path);
    for (const std::string& kv : args.overrides) {
        auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw wf::ConfigError("--set expects key=value, got: " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (args.seed >= 0) cfg.set("seed", std::to_string(args.seed));
    if (args.threads >= 0) cfg.set("threads", std::to_string(args.threads));
    if (args.n_samples >= 0) cfg.set("N", std::to_string(args.n_samples));
    if (args.approx_small_t) cfg.set("approx_small_t", "1");
    cfg.apply_env();
    return cfg;
}

int cmd_simulate(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    auto model = cfg.build_model();
    std::vector<double> theta = cfg.simulation_theta(*model);
    const int L = model->loci();
    std::vector<double> x0 = cfg.get_vector("x0");
    if (x0.empty()) x0.assign(L, 0.5);
    if (static_cast<int>(x0.size()) != L) throw wf::ConfigError("config: x0 needs one entry per locus");
    const int n = cfg.get_int("n_obs", 100);
    const double dt = cfg.get_double("dt", 1.0);
    std::vector<double> obs_times(n);
    for (int i = 0; i < n; ++i) obs_times[i] = (i + 1) * dt;

    wf::RngStream rng = wf::RngStream::derive(cfg.seed(), {wf::stream::kTransition, 7777});
    long proposals = 0;
    wf::ObservationSeries series =
        wf::simulate_path(*model, theta, x0, obs_times, rng, cfg.sim_options(), &proposals);

    std::string out = args.out.empty() ? cfg.get_string("out", "series.csv") : args.out;
    wf::write_series_csv(out, series, cfg.entries());

    double lo = 1.0, hi = 0.0;
    for (double v : series.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::cout << "simulate: wrote " << out << " (" << n << " increments, " << L
              << (L == 1 ? " locus" : " loci") << ")\n"
              << "simulate: state range [" << wf::format_double(lo) << ", "
              << wf::format_double(hi) << "]\n"
              << "simulate: accepted " << n << "/" << proposals << " proposals\n";
    return 0;
}

struct FrozenSetup {
    std::unique_ptr<wf::SelectionModel> model;
    std::unique_ptr<wf::ParameterDomain> domain;
    std::shared_ptr<std::vector<wf::ContributionDraws>> draws;
    wf::ObservationSeries series;
};

FrozenSetup freeze(const CommonArgs& args, const RunConfig& cfg) {
    FrozenSetup fs;
    fs.model = cfg.build_model();
    fs.domain = std::make_unique<wf::ParameterDomain>(cfg.build_domain(*fs.model));
    std::string data = args.data.empty() ? cfg.require_string("data") : args.data;
    fs.series = wf::read_series_csv(data);
    if (fs.series.loci != fs.model->loci())
        throw wf::DataError("dataset has " + std::to_string(fs.series.loci) +
                            " loci but the model expects " + std::to_string(fs.model->loci()));
    const int N = cfg.get_int("N", 100);
    std::string cache = args.cache.empty() ? cfg.get_string("cache", "") : args.cache;
    if (!cache.empty() && std::filesystem::exists(cache)) {
        fs.draws = std::make_shared<std::vector<wf::ContributionDraws>>(wf::load_draws(cache));
        if (static_cast<int>(fs.draws->size()) != fs.series.increments())
            throw wf::DataError("cache does not match the dataset increment count");
    } else {
        wf::DrawStats stats;
        fs.draws = std::make_shared<std::vector<wf::ContributionDraws>>(
            wf::draw_all_contributions(*fs.model, *fs.domain, fs.series, N, cfg.seed(),
                                       cfg.neutral_options(), cfg.threads(), &stats));
        std::cerr << "freeze: " << stats.poisson_points << " thinning points, "
                  << stats.stored_values << " stored bridge values (~"
                  << (stats.stored_values * 8) / 1024 << " KiB)\n";
        if (!cache.empty())
            wf::save_draws(cache, *fs.draws, cfg.seed(), fs.model->mutation().theta_a,
                           fs.model->mutation().theta_A);
    }
    return fs;
}

int cmd_estimate(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    FrozenSetup fs = freeze(args, cfg);
    wf::SamLikelihood lik(*fs.model, *fs.domain, fs.draws);
    wf::MleResult res = wf::maximize_likelihood(lik, cfg.optim_options(), cfg.seed());

    nlohmann::json out;
    out["theta_hat"] = res.theta_hat;
    out["log_lik"] = res.log_lik;
    out["N"] = (*fs.draws)[0].n_samples;
    out["seed"] = cfg.seed();
    out["evaluations"] = res.evaluations;
    out["converged"] = res.converged;
    std::string path = args.out.empty() ? cfg.get_string("out", "estimate.json") : args.out;
    wf::write_result_json(path, out, cfg.entries());
    std::cout << "estimate: theta_hat =";
    for (double v : res.theta_hat) std::cout << ' ' << wf::format_double(v);
    std::cout << ", log_lik = " << wf::format_double(res.log_lik) << ", wrote " << path << "\n";
    return res.converged ? 0 : 4;
}

int cmd_loglik_grid(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    FrozenSetup fs = freeze(args, cfg);
    wf::SamLikelihood lik(*fs.model, *fs.domain, fs.draws);

    const int dim = static_cast<int>(fs.domain->dim());
    const int axis = cfg.get_int("grid_dim", 0);
    if (axis < 0 || axis >= dim) throw wf::ConfigError("config: grid_dim out of range");
    const double lo = cfg.get_double("grid_lo", fs.domain->lower[axis]);
    const double hi = cfg.get_double("grid_hi", fs.domain->upper[axis]);
    const int points = cfg.get_int("grid_points", 101);
    if (points < 2 || !(lo < hi) || lo < fs.domain->lower[axis] || hi > fs.domain->upper[axis])
        throw wf::ConfigError("config: grid must sit inside the parameter domain");
    std::vector<double> base = cfg.get_vector("grid_fix");
    if (base.empty()) base = fs.domain->center();
    if (static_cast<int>(base.size()) != dim)
        throw wf::ConfigError("config: grid_fix needs theta_dim entries");

    std::string path = args.out.empty() ? cfg.get_string("out", "loglik_grid.csv") : args.out;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw wf::DataError("cannot open " + path + " for writing");
    f << "# wfexact " << WFEXACT_VERSION << "\n";
    for (const auto& [k, v] : cfg.entries()) f << "# config " << k << " = " << v << "\n";
    for (int c = 0; c < dim; ++c) f << "theta" << (c + 1) << ",";
    f << "log_lik\n";

    std::vector<double> values(points);
    std::vector<std::vector<double>> thetas(points, base);
    for (int i = 0; i < points; ++i)
        thetas[i][axis] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    wf::parallel_for(points, cfg.threads(),
                     [&](std::size_t i) { values[i] = lik.log_lik(thetas[i]); });
    for (int i = 0; i < points; ++i) {
        for (int c = 0; c < dim; ++c) f << wf::format_double(thetas[i][c]) << ",";
        f << wf::format_double(values[i]) << "\n";
    }
    std::cout << "loglik-grid: wrote " << path << " (" << points << " points)\n";
    return 0;
}

int cmd_bootstrap(const CommonArgs& args) {
    RunConfig cfg = load_config(args);
    FrozenSetup fs = freeze(args, cfg);
    wf::SamLikelihood lik(*fs.model, *fs.domain, fs.draws);
    wf::MleResult res = wf::maximize_likelihood(lik, cfg.optim_options(), cfg.seed());

    const int B = cfg.get_int("bootstrap_B", 50);
    const std::string unit = cfg.get_string("bootstrap_unit", "samples");
    if (unit != "samples" && unit != "observations")
        throw wf::ConfigError("config: bootstrap_unit must be samples|observations");
    std::vector<std::vector<double>> reps;
    std::vector<double> se = wf::bootstrap_se(lik, B, cfg.optim_options(), cfg.seed(),
                                              cfg.threads(), unit == "observations", &reps);

    nlohmann::json out;
    out["theta_hat"] = res.theta_hat;
    out["bootstrap_se"] = se;
    out["B"] = B;
    out["unit"] = unit;
    out["replicates"] = reps;
    out["seed"] = cfg.seed();
    out["N"] = (*fs.draws)[0].n_samples;
    std::string path = args.out.empty() ? cfg.get_string("out", "bootstrap.json") : args.out;
    wf::write_result_json(path, out, cfg.entries());
    std::cout << "bootstrap: SE =";
    for (double v : se) std::cout << ' ' << wf::format_double(v);
    std::cout << " (B = " << B << ", unit = " << unit << "), wrote " << path << "\n";
    return 0;
}

int cmd_selftest(const std::string& level, int threads) {
    std::vector<wf::selftest::CheckResult> results =
        level == "full" ? wf::selftest::run_full(threads) : wf::selftest::run_quick(threads);
    bool all = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " - " << r.detail << "\n";
        all &= r.pass;
    }
    std::cout << (all ? "selftest: all checks passed\n" : "selftest: FAILURES above\n");
    return all ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact Wright-Fisher diffusion simulation and unbiased MLE"};
    app.require_subcommand(1);

    CommonArgs sim_args, est_args, grid_args, boot_args;
    auto* sim = app.add_subcommand("simulate", "simulate a dataset with the exact algorithm");
    add_common(sim, sim_args, false);
    auto* est = app.add_subcommand("estimate", "maximum likelihood estimate from a dataset");
    add_common(est, est_args, true);
    auto* grid = app.add_subcommand("loglik-grid", "export the frozen-draw log likelihood curve");
    add_common(grid, grid_args, true);
    auto* boot = app.add_subcommand("bootstrap", "bootstrap standard errors");
    add_common(boot, boot_args, true);

    std::string level = "quick";
    int st_threads = 0;
    auto* st = app.add_subcommand("selftest", "run the built-in statistical audits");
    st->add_option("--level", level, "quick|full")->check(CLI::IsMember({"quick", "full"}));
    st->add_option("--threads", st_threads, "worker threads (0 = all cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(sim_args);
        if (est->parsed()) return cmd_estimate(est_args);
        if (grid->parsed()) return cmd_loglik_grid(grid_args);
        if (boot->parsed()) return cmd_bootstrap(boot_args);
        if (st->parsed()) {
            int threads = st_threads > 0
                              ? st_threads
                              : static_cast<int>(std::thread::hardware_concurrency());
            return cmd_selftest(level, threads > 0 ? threads : 1);
        }
    } catch (const wf::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const wf::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const wf::TimeTooSmall& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const wf::TruncationBudget& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const wf::RejectionBudget& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
