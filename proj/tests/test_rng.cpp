#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <vector>

#include "wfexact/rng.hpp"

using wf::RngStream;

TEST_CASE("streams are deterministic and key-separated") {
    RngStream a = RngStream::derive(42, {1, 2, 3});
    RngStream b = RngStream::derive(42, {1, 2, 3});
    RngStream c = RngStream::derive(42, {1, 2, 4});
    for (int i = 0; i < 100; ++i) {
        auto va = a.next_u64();
        CHECK(va == b.next_u64());
        CHECK(va != c.next_u64());
    }
}

TEST_CASE("uniform stays strictly inside (0,1)") {
    RngStream r = RngStream::derive(7, {0});
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 200000; ++i) {
        double u = r.uniform();
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo < 0.001);
    CHECK(hi > 0.999);
}

TEST_CASE("normal moments") {
    RngStream r = RngStream::derive(11, {1});
    const int n = 200000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
        double z = r.normal();
        s += z;
        s2 += z * z;
    }
    CHECK(std::fabs(s / n) < 4.0 / std::sqrt(static_cast<double>(n)));
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.02));
}

#include "wfexact/special.hpp"

TEST_CASE("beta draws: pair representation and exact law (KS)") {
    RngStream r = RngStream::derive(5, {2});
    const double a = 0.02, b = 0.02;  // boundary-hugging shape
    const int n = 50000;
    double s = 0.0;
    std::vector<double> F(n);
    for (int i = 0; i < n; ++i) {
        auto d = r.beta(a, b);
        // the pair carries the value even when one side rounds to 1.0
        CHECK(d.y > 0.0);
        CHECK(d.one_minus_y > 0.0);
        s += d.y;
        // probability integral transform through the complement when y ~ 1
        F[i] = d.y < 0.5 ? wf::incomplete_beta(a, b, d.y)
                         : 1.0 - wf::incomplete_beta(b, a, d.one_minus_y);
    }
    CHECK(std::fabs(s / n - 0.5) < 0.01);
    std::sort(F.begin(), F.end());
    CHECK(wf::ks_statistic(F) < 1.63 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("binomial inversion is exact on a small case") {
    RngStream r = RngStream::derive(13, {3});
    const int n = 5, trials = 200000;
    const double p = 0.3;
    std::vector<long> counts(n + 1, 0);
    for (int i = 0; i < trials; ++i) counts[r.binomial(n, p)]++;
    auto pmf = [&](int k) {
        double c = 1.0;
        for (int i = 0; i < k; ++i) c = c * (n - i) / (i + 1);
        return c * std::pow(p, k) * std::pow(1 - p, n - k);
    };
    for (int k = 0; k <= n; ++k) {
        double expect = pmf(k);
        double freq = static_cast<double>(counts[k]) / trials;
        CHECK(std::fabs(freq - expect) <
              4.0 * std::sqrt(expect * (1 - expect) / trials) + 1e-12);
    }
}

TEST_CASE("binomial handles extreme p") {
    RngStream r = RngStream::derive(17, {4});
    CHECK(r.binomial(50, 0.0) == 0);
    CHECK(r.binomial(50, 1.0) == 50);
    for (int i = 0; i < 1000; ++i) {
        int k = r.binomial(40, 1.0 - 1e-12);
        CHECK(k >= 39);
    }
}

TEST_CASE("poisson arrival times have the right count and law") {
    RngStream r = RngStream::derive(19, {5});
    const double rate = 2.0, horizon = 1.0;
    const int trials = 100000;
    double total = 0.0;
    for (int i = 0; i < trials; ++i) {
        auto times = r.poisson_times(rate, horizon);
        total += static_cast<double>(times.size());
        for (std::size_t j = 1; j < times.size(); ++j) CHECK(times[j] > times[j - 1]);
    }
    double mean = total / trials;
    CHECK(std::fabs(mean - rate * horizon) < 3.0 * std::sqrt(rate / trials));
    CHECK(r.poisson_times(0.0, 1.0).empty());
}
