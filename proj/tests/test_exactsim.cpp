#include <doctest.h>

#include <array>
#include <cmath>
#include <numeric>

#include "wfexact/exactsim.hpp"
#include "wfexact/likelihood.hpp"
#include "wfexact/special.hpp"

using namespace wf;

namespace {
const MutationRates kMu(0.02, 0.02);
}

TEST_CASE("marked poisson: degenerate rate, moments, uniform times") {
    RngStream rng = RngStream::derive(41, {stream::kPoisson});
    MarkedPoissonSample z = sample_marked_poisson(0.0, 1.0, true, rng);
    CHECK(z.times.empty());

    const int trials = 50000;
    double count = 0.0;
    std::vector<double> pooled;
    for (int i = 0; i < trials; ++i) {
        MarkedPoissonSample s = sample_marked_poisson(2.0, 1.0, true, rng);
        count += static_cast<double>(s.times.size());
        CHECK(s.marks.size() == s.times.size());
        for (double ti : s.times) pooled.push_back(ti);
    }
    CHECK(std::fabs(count / trials - 2.0) < 3.0 * std::sqrt(2.0 / trials));
    std::sort(pooled.begin(), pooled.end());
    std::vector<double> cdf(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i) cdf[i] = pooled[i];  // U(0,1) CDF
    CHECK(ks_statistic(cdf) < 1.63 / std::sqrt(static_cast<double>(pooled.size())));
}

TEST_CASE("acceptance indicator") {
    HaploidModel model(kMu);
    const double th = 0.7;
    PhiBounds pb = model.phi_bounds({&th, 1});

    CHECK(acceptance_indicator(model, {&th, 1}, {}, {}, pb));  // empty product

    const double zero = 0.0;
    PhiBounds pz = model.phi_bounds({&zero, 1});
    std::array states{0.3, 0.9};
    std::array marks{0.01, 0.02};
    CHECK(acceptance_indicator(model, {&zero, 1}, states, marks, pz));  // zero span

    // hand-built single-indicator case: g(0.3) ~ 0.934 under theta = 0.7
    double g = (model.phi1(0.3, th) - pb.lo) / (pb.hi - pb.lo);
    CHECK(g == doctest::Approx(0.934).epsilon(1e-3));
    std::array state1{0.3};
    std::array low_mark{0.5};
    CHECK(!acceptance_indicator(model, {&th, 1}, state1, low_mark, pb));
    std::array high_mark{0.97};
    CHECK(acceptance_indicator(model, {&th, 1}, state1, high_mark, pb));
    CHECK_THROWS(acceptance_indicator(model, {&th, 1}, states, low_mark, pb));
}

TEST_CASE("conditioned path: neutral accepts immediately; determinism") {
    HaploidModel model(kMu);
    SimOptions opts;
    opts.neutral.ancestral.approx_small_t = true;
    const double zero = 0.0;
    std::array x{0.3}, y{0.6};
    RngStream rng = RngStream::derive(43, {stream::kAccept});
    PathSkeleton sk = sample_conditioned_path(model, {&zero, 1}, x, y, 1.0, rng, opts);
    CHECK(sk.proposals == 1);  // zero thinning rate: no Poisson points, certain acceptance
    CHECK(sk.times.empty());

    const double th = 0.9;
    RngStream r1 = RngStream::derive(44, {stream::kAccept});
    RngStream r2 = RngStream::derive(44, {stream::kAccept});
    PathSkeleton a = sample_conditioned_path(model, {&th, 1}, x, y, 1.0, r1, opts);
    PathSkeleton b = sample_conditioned_path(model, {&th, 1}, x, y, 1.0, r2, opts);
    CHECK(a.proposals == b.proposals);
    CHECK(a.times == b.times);
    CHECK(a.values == b.values);
}

TEST_CASE("conditioned-path acceptance rate agrees with the product estimator") {
    // cross-estimator agreement: empirical acceptance of the rejection
    // sampler vs the mark-free thinning product on fresh frozen draws
    HaploidModel model(kMu);
    const double th = 2.0;  // larger rate so acceptance is visibly below 1
    std::array x{0.3}, y{0.6};
    const double t = 1.0;
    SimOptions opts;
    opts.neutral.ancestral.approx_small_t = true;

    const int trials = 3000;
    long proposals = 0;
    RngStream rng = RngStream::derive(45, {stream::kAccept});
    for (int i = 0; i < trials; ++i) {
        PathSkeleton sk = sample_conditioned_path(model, {&th, 1}, x, y, t, rng, opts);
        proposals += sk.proposals;
    }
    double acc_hat = static_cast<double>(trials) / static_cast<double>(proposals);

    // product estimator with rho equal to the span at this theta
    PhiBounds pb = model.phi_bounds({&th, 1});
    ParameterDomain tight = ParameterDomain::scalar(th, th);
    ContributionDraws d = draw_contribution(model, tight, x, y, t, 4000, 909, 0, opts.neutral);
    CHECK(d.blocks[0].rho == doctest::Approx(pb.hi - pb.lo).epsilon(1e-12));
    double a_prod = a_estimate(d, model, {&th, 1}, tight);

    // binomial SE for the acceptance estimate, delta-method on 1/mean
    double se = std::sqrt(acc_hat * acc_hat * (1.0 - acc_hat) / trials);
    CHECK(std::fabs(acc_hat - a_prod) < 4.0 * se + 0.01);
}

TEST_CASE("unconditioned simulation: neutral reduction and determinism") {
    HaploidModel model(kMu);
    SimOptions opts;
    opts.neutral.ancestral.approx_small_t = true;
    std::array x0{0.5};
    std::vector<double> obs(20);
    std::iota(obs.begin(), obs.end(), 1.0);

    const double zero = 0.0;
    long props = 0;
    RngStream rng = RngStream::derive(46, {stream::kTransition});
    ObservationSeries s = simulate_path(model, {&zero, 1}, x0, obs, rng, opts, &props);
    CHECK(props == 20);  // a_plus(0) = 0 and empty thinning: every proposal accepted
    CHECK(s.increments() == 20);

    // under selection the path may hit the representable boundary (an error
    // by contract); find a surviving seed deterministically and check
    // reproducibility on it
    const double th = 0.7;
    std::uint64_t good = 0;
    ObservationSeries a;
    long p1 = 0;
    for (std::uint64_t sd = 100; sd < 140; ++sd) {
        RngStream r = RngStream::derive(sd, {stream::kTransition});
        try {
            a = simulate_path(model, {&th, 1}, x0, obs, r, opts, &p1);
            good = sd;
            break;
        } catch (const DataError&) {
            continue;
        }
    }
    REQUIRE(good != 0);
    RngStream r2 = RngStream::derive(good, {stream::kTransition});
    long p2 = 0;
    ObservationSeries b = simulate_path(model, {&th, 1}, x0, obs, r2, opts, &p2);
    CHECK(p1 == p2);
    CHECK(a.values == b.values);
    for (double v : a.values) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("proposal counts are geometric (mean vs acceptance probability)") {
    HaploidModel model(kMu);
    const double th = 2.0;
    std::array x{0.3}, y{0.6};
    SimOptions opts;
    opts.neutral.ancestral.approx_small_t = true;
    const int trials = 4000;
    std::vector<long> counts(trials);
    RngStream rng = RngStream::derive(48, {stream::kAccept});
    for (int i = 0; i < trials; ++i)
        counts[i] = sample_conditioned_path(model, {&th, 1}, x, y, 1.0, rng, opts).proposals;
    double mean = std::accumulate(counts.begin(), counts.end(), 0.0) / trials;
    // for a geometric law, Var = (1-p)/p^2 = mean(mean-1)
    double var_hat = 0.0;
    for (long c : counts) var_hat += (c - mean) * (c - mean);
    var_hat /= trials - 1;
    double var_geom = mean * (mean - 1.0);
    CHECK(var_hat == doctest::Approx(var_geom).epsilon(0.35));
}
