#include "wfexact/selftest.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numeric>

#include "wfexact/coupled.hpp"
#include "wfexact/exactsim.hpp"
#include "wfexact/inference.hpp"
#include "wfexact/likelihood.hpp"
#include "wfexact/special.hpp"
#include "wfexact/threading.hpp"

namespace wf::selftest {

namespace {

constexpr std::uint64_t kBenchmarkSeed = 2024;

std::string fmt(const char* pattern, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), pattern, args...);
    return buf;
}

MutationRates benchmark_mu() { return MutationRates(0.02, 0.02); }

NeutralOptions path_options() {
    // Poisson skeleton times can fall arbitrarily close to an interval end,
    // so path machinery runs with the labeled small-gap fallback enabled.
    NeutralOptions opts;
    opts.ancestral.approx_small_t = true;
    return opts;
}

}  // namespace

ObservationSeries benchmark_series(int n_increments, std::uint64_t seed) {
    HaploidModel model(benchmark_mu());
    const double theta = 0.7;
    SimOptions opts;
    opts.neutral = path_options();
    std::vector<double> obs_times(n_increments);
    for (int i = 0; i < n_increments; ++i) obs_times[i] = i + 1.0;
    RngStream rng = RngStream::derive(seed, {stream::kTransition, 7777});
    double x0 = 0.5;
    return simulate_path(model, {&theta, 1}, {&x0, 1}, obs_times, rng, opts);
}

CheckResult block_sampler_exactness(bool full) {
    const int n_draws = full ? 100000 : 20000;
    std::vector<std::pair<double, double>> cases;
    if (full) {
        for (double t : {0.25, 1.0, 5.0})
            for (double th : {0.04, 0.5}) cases.push_back({t, th});
    } else {
        cases = {{1.0, 0.04}, {0.25, 0.5}};
    }
    double worst_tv = 0.0, worst_p = 1.0;
    for (auto [t, th] : cases) {
        AncestralSeries series(t, th);
        // oracle pmf to tail < 1e-10
        std::vector<double> q;
        double cum = 0.0;
        for (int m = 0; cum < 1.0 - 1e-10; ++m) {
            q.push_back(series.pmf(m, 1e-12));
            cum += q.back();
        }
        std::vector<long> counts(q.size() + 1, 0);
        RngStream rng = RngStream::derive(kBenchmarkSeed, {stream::kSelftest, 1,
                                                           static_cast<std::uint64_t>(t * 100),
                                                           static_cast<std::uint64_t>(th * 100)});
        for (int i = 0; i < n_draws; ++i) {
            int m = series.sample(rng);
            counts[std::min<std::size_t>(m, q.size())]++;
        }
        double tv = 0.0;
        for (std::size_t m = 0; m < q.size(); ++m)
            tv += std::fabs(static_cast<double>(counts[m]) / n_draws - q[m]);
        tv = 0.5 * (tv + static_cast<double>(counts[q.size()]) / n_draws + (1.0 - cum));
        worst_tv = std::max(worst_tv, tv);

        // chi-square with expected-count >= 5 pooling
        double stat = 0.0;
        int bins = 0;
        double pool_exp = 0.0;
        long pool_obs = 0;
        for (std::size_t m = 0; m <= q.size(); ++m) {
            double e = (m < q.size() ? q[m] : 1.0 - cum) * n_draws;
            long o = counts[m];
            if (e >= 5.0) {
                stat += (o - e) * (o - e) / e;
                ++bins;
            } else {
                pool_exp += e;
                pool_obs += o;
            }
        }
        if (pool_exp > 0.0) {
            stat += (pool_obs - pool_exp) * (pool_obs - pool_exp) / pool_exp;
            ++bins;
        }
        double p = chi_square_sf(stat, bins - 1);
        worst_p = std::min(worst_p, p);
    }
    CheckResult r;
    r.name = "block-count sampler exactness (TV + chi-square)";
    r.pass = worst_tv < 0.01 && worst_p >= 0.001;
    r.detail = fmt("worst TV = %.4g (< 0.01), worst chi-square p = %.4g (>= 0.001)", worst_tv,
                   worst_p);
    return r;
}

CheckResult density_unbiasedness(bool full) {
    const int tuples = full ? 10 : 3;
    const int n_draws = full ? 10000 : 2000;
    MutationRates mu = benchmark_mu();
    RngStream pick = RngStream::derive(kBenchmarkSeed, {stream::kSelftest, 2});
    double worst_z = 0.0;
    for (int c = 0; c < tuples; ++c) {
        double x = 0.05 + 0.9 * pick.uniform();
        double y = 0.05 + 0.9 * pick.uniform();
        double t = 0.25 + 4.75 * pick.uniform();
        AncestralSeries series(t, mu.theta());
        double sum = 0.0, sumsq = 0.0;
        RngStream rng = RngStream::derive(kBenchmarkSeed,
                                          {stream::kSelftest, 3, static_cast<std::uint64_t>(c)});
        for (int j = 0; j < n_draws; ++j) {
            int m = series.sample(rng);
            double d = density_given_m(m, x, y, mu);
            sum += d;
            sumsq += d * d;
        }
        double mean = sum / n_draws;
        double sd = std::sqrt(std::max(0.0, sumsq / n_draws - mean * mean));
        double se = sd / std::sqrt(static_cast<double>(n_draws));
        double oracle = transition_density_oracle(x, y, t, mu, 1e-10);
        double z = se > 0.0 ? std::fabs(mean - oracle) / se : 0.0;
        worst_z = std::max(worst_z, z);
    }
    CheckResult r;
    r.name = "transition density estimator unbiasedness";
    r.pass = worst_z < 4.0;
    r.detail = fmt("worst |mean - oracle| = %.3g standard errors (< 4)", worst_z);
    return r;
}

CheckResult bridge_marginal_law(bool full) {
    const int n_draws = full ? 10000 : 2000;
    MutationRates mu = benchmark_mu();
    const double x = 0.2, y = 0.7, t = 1.0;
    NeutralOptions opts;
    BridgeStepSampler sampler(x, y, 0.5 * t, 0.5 * t, mu, opts);
    RngStream rng = RngStream::derive(kBenchmarkSeed, {stream::kSelftest, 4});
    std::vector<double> z(n_draws);
    for (int i = 0; i < n_draws; ++i) z[i] = sampler.sample(rng);
    std::sort(z.begin(), z.end());

    auto density = [&](double v, double omv) {
        return transition_density_oracle(x, v, 0.5 * t, mu, 1e-9, {}, omv) *
               transition_density_oracle(v, y, 0.5 * t, mu, 1e-9);
    };
    const double norm = integrate_unit_density(density, 1e-290);
    // CDF at the sorted sample points by segment-wise quadrature
    std::vector<double> cdf(n_draws);
    double acc = 0.0;
    double prev = 0.0;
    for (int i = 0; i < n_draws; ++i) {
        double zi = z[i];
        if (zi > prev) {
            if (prev == 0.0) {
                // head segment: substitute u = log v to absorb the singularity
                double u_lo = std::log(1e-290);
                double u_hi = std::log(zi);
                int panels = std::max(8, static_cast<int>((u_hi - u_lo) / 4.0));
                acc += integrate_gl(
                    [&](double u) {
                        double v = std::exp(u);
                        return density(v, 1.0 - v) * v;
                    },
                    u_lo, u_hi, panels);
            } else {
                acc += integrate_gl([&](double v) { return density(v, 1.0 - v); }, prev, zi, 4);
            }
            prev = zi;
        }
        cdf[i] = acc / norm;
    }
    double ks = ks_statistic(cdf);
    CheckResult r;
    r.name = "bridge midpoint marginal (KS vs product density)";
    r.pass = ks < 0.02;
    r.detail = fmt("KS distance = %.4g over %d draws (< 0.02)", ks, n_draws);
    return r;
}

CheckResult girsanov_unit_mass(bool full, int threads) {
    const int n_rep = full ? 100000 : 10000;
    MutationRates mu = benchmark_mu();
    HaploidModel model(mu);
    const double theta = 0.7;
    const double u0 = 0.3, dt = 1.0;
    ParameterDomain box = ParameterDomain::scalar(-1.0, 1.0);
    const double rho = model.sam_rate(box);
    PhiBounds pb = model.phi_bounds({&theta, 1});
    NeutralOptions nopts = path_options();

    std::vector<double> w(n_rep);
    parallel_for(n_rep, threads, [&](std::size_t i) {
        RngStream rng = RngStream::derive(kBenchmarkSeed, {stream::kSelftest, 5, i});
        AncestralSeries series(dt, mu.theta(), nopts.ancestral);
        TransitionDraw td = sample_transition(u0, series, mu, rng);
        std::vector<double> times = rng.poisson_times(rho, dt);
        BridgeSkeleton sk = sample_bridge_skeleton(u0, td.y, dt, times, mu, rng, nopts);
        double prod = 1.0;
        for (double v : sk.values) {
            double phi = model.phi1(v, theta);
            prod *= 1.0 - (phi - pb.lo) / rho;
        }
        double a_diff = model.girsanov_A({&td.y, 1}, {&theta, 1}) -
                        model.girsanov_A({&u0, 1}, {&theta, 1});
        w[i] = std::exp(a_diff - dt * pb.lo) * prod;
    });
    double mean = std::accumulate(w.begin(), w.end(), 0.0) / n_rep;
    double ss = 0.0;
    for (double v : w) ss += (v - mean) * (v - mean);
    double se = std::sqrt(ss / (n_rep - 1.0) / n_rep);
    double zscore = std::fabs(mean - 1.0) / se;
    CheckResult r;
    r.name = "Girsanov unit-mass identity (thinning rate audit)";
    r.pass = zscore < 3.0;
    r.detail = fmt("mean = %.6f, SE = %.2g, |mean-1| = %.2f SE (< 3)", mean, se, zscore);
    return r;
}

CheckResult neutral_reduction() {
    MutationRates mu = benchmark_mu();
    HaploidModel model(mu);
    ParameterDomain box = ParameterDomain::scalar(-1.0, 1.0);
    const double x = 0.3, y = 0.6, t = 1.0;
    NeutralOptions nopts = path_options();
    ContributionDraws d = draw_contribution(model, box, {&x, 1}, {&y, 1}, t, 32, kBenchmarkSeed,
                                            0, nopts);
    const double zero = 0.0;
    double lc = log_contribution_estimate(d, model, {&zero, 1}, box);
    double ld = log_mean_exp(d.log_density);
    CheckResult r;
    r.name = "neutral reduction (contribution == density estimate, bitwise)";
    r.pass = lc == ld && std::exp(lc) == std::exp(ld);
    r.detail = fmt("log contribution %.17g vs log density %.17g", lc, ld);
    return r;
}

CheckResult benchmark_trend(bool full, int threads) {
    const int n_obs = full ? 100 : 40;
    const int B = full ? 50 : 20;
    const std::vector<int> Ns = full ? std::vector<int>{10, 100, 500} : std::vector<int>{10, 100};
    const int n_large = full ? 1000 : 200;

    ObservationSeries series = benchmark_series(n_obs, kBenchmarkSeed);
    HaploidModel model(benchmark_mu());
    ParameterDomain box = ParameterDomain::scalar(-2.0, 2.0);
    NeutralOptions nopts = path_options();
    OptimOptions optim;

    std::vector<double> hats, ses;
    for (int N : Ns) {
        auto draws = std::make_shared<std::vector<ContributionDraws>>(draw_all_contributions(
            model, box, series, N, kBenchmarkSeed, nopts, threads));
        SamLikelihood lik(model, box, draws);
        MleResult res = maximize_likelihood(lik, optim, kBenchmarkSeed);
        std::vector<double> se = bootstrap_se(lik, B, optim, kBenchmarkSeed, threads);
        hats.push_back(res.theta_hat[0]);
        ses.push_back(se[0]);
    }
    auto draws_large = std::make_shared<std::vector<ContributionDraws>>(draw_all_contributions(
        model, box, series, n_large, kBenchmarkSeed, nopts, threads));
    SamLikelihood lik_large(model, box, draws_large);
    double hat_large = maximize_likelihood(lik_large, optim, kBenchmarkSeed).theta_hat[0];

    bool se_decreasing = true;
    for (std::size_t i = 1; i < ses.size(); ++i) se_decreasing &= ses[i] < ses[i - 1];
    double hat_best = hats.back();
    double se_best = ses.back();
    bool close_to_large = std::fabs(hat_best - hat_large) <= 3.0 * se_best;
    bool near_truth = !full || (hat_best >= 0.55 && hat_best <= 0.85);

    CheckResult r;
    r.name = "benchmark MLE consistency trend (N sweep + bootstrap SE)";
    r.pass = se_decreasing && close_to_large && near_truth;
    std::string hs, ss;
    for (std::size_t i = 0; i < hats.size(); ++i)
        hs += fmt("N=%d: %.3f (%.4f)  ", Ns[i], hats[i], ses[i]);
    r.detail = hs + fmt("large-N: %.3f; SE decreasing=%d, |hat-large|<=3SE=%d, in [0.55,0.85]=%d",
                        hat_large, int(se_decreasing), int(close_to_large), int(near_truth));
    return r;
}

CheckResult coupled_factorization(bool full, int threads) {
    const int n_obs = full ? 40 : 12;
    const int N = full ? 100 : 40;
    MutationRates mu = benchmark_mu();
    CoupledModel coupled(2, mu, false);
    const std::vector<double> c_true = {0.35, 0.1};
    ParameterDomain box({-1.0, -1.0}, {1.0, 1.0});
    NeutralOptions nopts = path_options();

    // two-locus data (independent loci)
    SimOptions sopts;
    sopts.neutral = nopts;
    std::vector<double> obs_times(n_obs);
    for (int i = 0; i < n_obs; ++i) obs_times[i] = i + 1.0;
    RngStream rng = RngStream::derive(kBenchmarkSeed, {stream::kSelftest, 6});
    std::vector<double> x0 = {0.5, 0.5};
    ObservationSeries series = simulate_path(coupled, c_true, x0, obs_times, rng, sopts);

    auto draws = std::make_shared<std::vector<ContributionDraws>>(
        draw_all_contributions(coupled, box, series, N, kBenchmarkSeed, nopts, threads));
    SamLikelihood lik(coupled, box, draws);

    // scalar slices: per-locus draws + haploid model at theta = 2 c
    HaploidModel hap(mu);
    ParameterDomain hap_box[2] = {ParameterDomain::scalar(-2.0, 2.0),
                                  ParameterDomain::scalar(-2.0, 2.0)};
    std::vector<std::shared_ptr<std::vector<ContributionDraws>>> locus_draws(2);
    for (int k = 0; k < 2; ++k) {
        auto ld = std::make_shared<std::vector<ContributionDraws>>();
        for (const auto& d : *draws) {
            ContributionDraws s;
            s.loci = 1;
            s.t = d.t;
            s.x = {d.x[k]};
            s.y = {d.y[k]};
            s.n_samples = d.n_samples;
            s.m_draws.resize(d.n_samples);
            s.log_density.resize(d.n_samples);
            for (int j = 0; j < d.n_samples; ++j) {
                int m = d.m_draws[static_cast<std::size_t>(j) * 2 + k];
                s.m_draws[j] = m;
                s.log_density[j] = log_density_given_m(m, s.x[0], s.y[0], 1.0 - s.y[0], mu);
            }
            s.blocks.push_back(d.blocks[k]);
            s.blocks[0].loci_ids = {0};
            ld->push_back(std::move(s));
        }
        locus_draws[k] = ld;
    }

    // value identity on a small grid
    double worst = 0.0;
    for (double c1 : {-0.4, 0.0, 0.35, 0.8}) {
        for (double c2 : {-0.2, 0.1, 0.5}) {
            double joint = lik.log_lik(std::array{c1, c2});
            double split = 0.0;
            for (int k = 0; k < 2; ++k) {
                SamLikelihood lk(hap, hap_box[k], locus_draws[k]);
                double th = 2.0 * (k == 0 ? c1 : c2);
                split += lk.log_lik({&th, 1});
            }
            worst = std::max(worst, std::fabs(joint - split));
        }
    }

    // maximizer identity: simplex on the coupled family vs per-locus Brent
    OptimOptions optim;
    MleResult joint_mle = maximize_likelihood(lik, optim, kBenchmarkSeed);
    double brent_c[2];
    for (int k = 0; k < 2; ++k) {
        SamLikelihood lk(hap, hap_box[k], locus_draws[k]);
        MleResult r = maximize_likelihood(lk, optim, kBenchmarkSeed);
        brent_c[k] = 0.5 * r.theta_hat[0];
    }
    double dmax = std::max(std::fabs(joint_mle.theta_hat[0] - brent_c[0]),
                           std::fabs(joint_mle.theta_hat[1] - brent_c[1]));

    CheckResult r;
    r.name = "coupled factorization (values + maximizers, h = 0)";
    r.pass = worst <= 1e-10 && dmax <= 2.0 * optim.xtol;
    r.detail = fmt("max |joint - sum of scalars| = %.3g (<= 1e-10); "
                   "max |simplex - per-locus Brent| = %.3g (<= %.1g)",
                   worst, dmax, 2.0 * optim.xtol);
    return r;
}

CheckResult sam_continuity(bool full, int threads) {
    const int n_obs = full ? 100 : 30;
    const int N = full ? 100 : 40;
    const int grid_n = 200;
    ObservationSeries series = benchmark_series(n_obs, kBenchmarkSeed);
    HaploidModel model(benchmark_mu());
    ParameterDomain box = ParameterDomain::scalar(-1.0, 1.0);
    NeutralOptions nopts = path_options();
    auto draws = std::make_shared<std::vector<ContributionDraws>>(
        draw_all_contributions(model, box, series, N, kBenchmarkSeed, nopts, threads));
    SamLikelihood lik(model, box, draws);

    std::vector<double> f(grid_n);
    parallel_for(grid_n, threads, [&](std::size_t i) {
        double th = -1.0 + 2.0 * static_cast<double>(i) / (grid_n - 1);
        f[i] = lik.log_lik({&th, 1});
    });
    double fmax = *std::max_element(f.begin(), f.end());
    std::vector<double> jumps(grid_n - 1);
    for (int i = 0; i + 1 < grid_n; ++i) jumps[i] = std::fabs(f[i + 1] - f[i]);
    std::vector<double> sorted = jumps;
    std::sort(sorted.begin(), sorted.end());
    double p95 = sorted[static_cast<std::size_t>(0.95 * (sorted.size() - 1))];
    double jump_cap = 4.0 * p95 + 1e-8 * (1.0 + std::fabs(fmax));
    double max_jump = sorted.back();
    bool continuous = max_jump <= jump_cap;

    OptimOptions optim;
    optim.xtol = 1e-7;
    optim.max_eval = 300;
    double lo_list[5] = {-1.0, -0.8, -0.6, -0.4, -0.2};
    double hat_min = 1e300, hat_max = -1e300;
    for (double lo : lo_list) {
        MleResult r = brent_maximize([&](double v) { return lik.log_lik({&v, 1}); }, lo, 1.0,
                                     optim.xtol, optim.max_eval);
        hat_min = std::min(hat_min, r.theta_hat[0]);
        hat_max = std::max(hat_max, r.theta_hat[0]);
    }
    bool stable = (hat_max - hat_min) <= 1e-6;

    CheckResult r;
    r.name = "frozen-draw likelihood continuity + bracketing-independent Brent";
    r.pass = continuous && stable;
    r.detail = fmt("max grid jump %.3g (cap %.3g); Brent spread %.2g (<= 1e-6), hat ~ %.4f",
                   max_jump, jump_cap, hat_max - hat_min, 0.5 * (hat_min + hat_max));
    return r;
}

std::vector<CheckResult> run_quick(int threads) {
    return {
        block_sampler_exactness(false), density_unbiasedness(false), bridge_marginal_law(false),
        girsanov_unit_mass(false, threads), neutral_reduction(),
        coupled_factorization(false, threads), sam_continuity(false, threads),
    };
}

std::vector<CheckResult> run_full(int threads) {
    return {
        block_sampler_exactness(true), density_unbiasedness(true), bridge_marginal_law(true),
        girsanov_unit_mass(true, threads), neutral_reduction(), benchmark_trend(true, threads),
        coupled_factorization(true, threads), sam_continuity(true, threads),
    };
}

}  // namespace wf::selftest
