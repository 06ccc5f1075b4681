#include <doctest.h>

#include <array>
#include <cmath>

#include "wfexact/inference.hpp"

using namespace wf;

namespace {
const MutationRates kMu(0.02, 0.02);
constexpr double kPi = 3.14159265358979323846;
}  // namespace

TEST_CASE("brent: quadratic, sine, constant, budget") {
    MleResult q = brent_maximize([](double x) { return -(x - 0.3) * (x - 0.3); }, -1.0, 1.0,
                                 1e-8, 200);
    CHECK(q.converged);
    CHECK(q.theta_hat[0] == doctest::Approx(0.3).epsilon(1e-7));

    MleResult s = brent_maximize([](double x) { return std::sin(x); }, 0.0, 3.0, 1e-8, 200);
    CHECK(s.theta_hat[0] == doctest::Approx(kPi / 2).epsilon(1e-7));

    MleResult c = brent_maximize([](double) { return 2.5; }, -1.0, 2.0, 1e-8, 200);
    CHECK(c.converged);
    CHECK(c.log_lik == 2.5);
    CHECK(c.theta_hat[0] >= -1.0);
    CHECK(c.theta_hat[0] <= 2.0);

    MleResult b = brent_maximize([](double x) { return -x * x; }, -1.0, 1.0, 1e-14, 4);
    CHECK(!b.converged);

    // never evaluates outside the interval
    brent_maximize(
        [](double x) {
            REQUIRE(x >= 0.2);
            REQUIRE(x <= 0.9);
            return -(x - 0.5) * (x - 0.5);
        },
        0.2, 0.9, 1e-10, 300);
}

TEST_CASE("simplex: bowl, boundary feasibility, budget") {
    ParameterDomain box({-2.0, -2.0}, {2.0, 2.0});
    auto bowl = [](std::span<const double> p) {
        double a = p[0] - 0.4, b = p[1] + 0.9;
        return -(a * a + 2.0 * b * b);
    };
    std::array start{0.0, 0.0};
    MleResult r = simplex_maximize(bowl, box, start, 1e-7, 4000);
    CHECK(r.converged);
    CHECK(r.theta_hat[0] == doctest::Approx(0.4).epsilon(1e-4));
    CHECK(r.theta_hat[1] == doctest::Approx(-0.9).epsilon(1e-4));

    // boundary start: all iterates stay inside the box
    auto checked = [&](std::span<const double> p) {
        REQUIRE(p[0] >= box.lower[0]);
        REQUIRE(p[0] <= box.upper[0]);
        REQUIRE(p[1] >= box.lower[1]);
        REQUIRE(p[1] <= box.upper[1]);
        return bowl(p);
    };
    std::array corner{-2.0, 2.0};
    MleResult rb = simplex_maximize(checked, box, corner, 1e-6, 4000);
    CHECK(rb.theta_hat[0] == doctest::Approx(0.4).epsilon(1e-3));

    MleResult rc = simplex_maximize(bowl, box, start, 1e-12, 10);
    CHECK(!rc.converged);
}

namespace {
NeutralOptions path_opts() {
    NeutralOptions o;
    o.ancestral.approx_small_t = true;
    return o;
}

ObservationSeries tiny_series() {
    ObservationSeries s;
    s.loci = 1;
    s.times = {0.0, 1.0, 2.0, 3.0};
    s.values = {0.4, 0.55, 0.5, 0.65};
    return s;
}
}  // namespace

TEST_CASE("estimate_mle is deterministic and respects the domain") {
    HaploidModel model(kMu);
    ParameterDomain box = ParameterDomain::scalar(-1.0, 1.0);
    EstimateOptions opts;
    opts.n_samples = 16;
    opts.seed = 5150;
    opts.neutral = path_opts();
    MleResult a = estimate_mle(model, box, tiny_series(), opts);
    MleResult b = estimate_mle(model, box, tiny_series(), opts);
    CHECK(a.theta_hat == b.theta_hat);
    CHECK(a.log_lik == b.log_lik);
    CHECK(a.evaluations == b.evaluations);
    CHECK(a.theta_hat[0] >= -1.0);
    CHECK(a.theta_hat[0] <= 1.0);

    // the reported value re-evaluates to the same number on the frozen draws
    auto draws = std::make_shared<std::vector<ContributionDraws>>(draw_all_contributions(
        model, box, tiny_series(), opts.n_samples, opts.seed, opts.neutral, 1));
    SamLikelihood lik(model, box, draws);
    CHECK(std::fabs(lik.log_lik(a.theta_hat) - a.log_lik) < 1e-12);
}

TEST_CASE("bootstrap: two-replicate SD identity, determinism, threads-invariance") {
    HaploidModel model(kMu);
    ParameterDomain box = ParameterDomain::scalar(-1.0, 1.0);
    auto draws = std::make_shared<std::vector<ContributionDraws>>(draw_all_contributions(
        model, box, tiny_series(), 24, 6001, path_opts(), 1));
    SamLikelihood lik(model, box, draws);
    OptimOptions optim;

    std::vector<std::vector<double>> reps;
    std::vector<double> se2 = bootstrap_se(lik, 2, optim, 314, 1, false, &reps);
    CHECK(reps.size() == 2);
    double direct = std::fabs(reps[0][0] - reps[1][0]) / std::sqrt(2.0);
    CHECK(se2[0] == doctest::Approx(direct).epsilon(1e-12));

    std::vector<double> se_a = bootstrap_se(lik, 6, optim, 314, 1);
    std::vector<double> se_b = bootstrap_se(lik, 6, optim, 314, 4);
    CHECK(se_a[0] == se_b[0]);  // replicate-indexed streams: thread-count invariant

    CHECK_THROWS_AS(bootstrap_se(lik, 1, optim, 314, 1), ConfigError);
}
