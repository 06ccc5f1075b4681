#include <doctest.h>

#include <array>
#include <cmath>

#include "wfexact/model.hpp"

using namespace wf;

namespace {
const MutationRates kMu(0.02, 0.02);
}

TEST_CASE("mutation drift alpha") {
    CHECK(kMu.alpha(0.5) == 0.0);
    CHECK(kMu.alpha(0.0) == doctest::Approx(0.01).epsilon(1e-15));
    // closed form at x = 1: (theta_a - theta)/2 = -theta_A/2
    CHECK(kMu.alpha(1.0) == doctest::Approx(-0.01).epsilon(1e-15));
    CHECK(MutationRates(0.07, 0.02).alpha(0.0) == doctest::Approx(0.035).epsilon(1e-15));
    CHECK_THROWS_AS(MutationRates(0.0, 0.1), ConfigError);
}

TEST_CASE("haploid phi closed forms") {
    HaploidModel m(kMu);
    CHECK(m.phi1(0.37, 0.0) == 0.0);
    CHECK(m.phi1(0.0, 0.7) == doctest::Approx(0.0035).epsilon(1e-14));
    CHECK(m.phi1(1.0, 0.7) == doctest::Approx(-0.0035).epsilon(1e-14));
}

TEST_CASE("haploid phi agrees with the generic eta-based formula") {
    HaploidModel m(kMu);
    for (double th : {-1.0, -0.3, 0.0, 0.4, 0.7, 1.0}) {
        for (int i = 0; i <= 100; ++i) {
            double x = i / 100.0;
            double generic = phi_scalar_generic(x, 0.5 * th, 0.0, kMu);
            CHECK(m.phi1(x, th) == doctest::Approx(generic).epsilon(1e-14));
        }
    }
}

TEST_CASE("haploid girsanov potential") {
    HaploidModel m(kMu);
    double th = 0.7;
    double a6 = m.girsanov_A(std::array{0.6}, {&th, 1});
    double a3 = m.girsanov_A(std::array{0.3}, {&th, 1});
    CHECK(a6 - a3 == doctest::Approx(0.105).epsilon(1e-14));
    double z = 0.0;
    CHECK(m.girsanov_A(std::array{0.9}, {&z, 1}) == 0.0);
    CHECK(m.a_plus({&th, 1}) == doctest::Approx(0.35).epsilon(1e-15));
    double neg = -0.7;
    CHECK(m.a_plus({&neg, 1}) == 0.0);
}

TEST_CASE("haploid phi bounds: vertex and endpoint candidates") {
    HaploidModel m(kMu);
    PhiBounds b = m.phi_bounds1(0.7);
    CHECK(b.lo == doctest::Approx(-0.0035).epsilon(1e-14));
    CHECK(b.hi == doctest::Approx(0.0155125).epsilon(1e-14));
    PhiBounds z = m.phi_bounds1(0.0);
    CHECK(z.lo == 0.0);
    CHECK(z.hi == 0.0);
    // dense grid stays inside for a spread of parameters
    for (double th : {-1.0, -0.5, 0.02, 0.7, 1.0, 3.0}) {
        PhiBounds pb = m.phi_bounds1(th);
        for (int i = 0; i <= 10000; ++i) {
            double x = i / 10000.0;
            double p = m.phi1(x, th);
            CHECK(p >= pb.lo - 1e-12);
            CHECK(p <= pb.hi + 1e-12);
        }
    }
    // vertex abscissa outside [0,1]: theta small positive pushes it far left
    PhiBounds small = m.phi_bounds1(0.01);  // vertex at 1/2 - 4 = -3.5
    CHECK(small.hi == doctest::Approx(std::max(m.phi1(0.0, 0.01), m.phi1(1.0, 0.01))).epsilon(1e-13));
}

TEST_CASE("haploid dominating rate over a box") {
    HaploidModel m(kMu);
    CHECK(m.sam_rate(ParameterDomain::scalar(-1.0, 1.0)) ==
          doctest::Approx(0.03645).epsilon(1e-13));
    CHECK(m.sam_rate(ParameterDomain::scalar(0.0, 0.0)) == 0.0);
    // grid audit: rate dominates the span over a dense parameter grid
    ParameterDomain box = ParameterDomain::scalar(-1.0, 1.0);
    double rate = m.sam_rate(box);
    for (int i = 0; i <= 1000; ++i) {
        double th = -1.0 + 2.0 * i / 1000.0;
        PhiBounds pb = m.phi_bounds1(th);
        CHECK(rate >= pb.hi - pb.lo - 1e-14);
    }
}

TEST_CASE("parameter domain validation") {
    CHECK_THROWS_AS(ParameterDomain({1.0}, {0.0}), ConfigError);
    CHECK_THROWS_AS(ParameterDomain({}, {}), ConfigError);
    ParameterDomain d({-1.0, 0.0}, {1.0, 0.0});  // degenerate second component is fine
    double inside[2] = {0.5, 0.0};
    double outside[2] = {0.5, 0.1};
    CHECK(d.contains({inside, 2}));
    CHECK(!d.contains({outside, 2}));
}

TEST_CASE("theta continuity of phi and A (no jumps on a fine grid)") {
    HaploidModel m(kMu);
    double x = 0.37;
    double prev_phi = m.phi1(x, -1.0);
    double prev_a = -0.5 * 1.0 * x;
    for (int i = 1; i <= 20000; ++i) {
        double th = -1.0 + 2.0 * i / 20000.0;
        double p = m.phi1(x, th);
        double a = m.girsanov_A({&x, 1}, {&th, 1});
        CHECK(std::fabs(p - prev_phi) < 1e-3);
        CHECK(std::fabs(a - prev_a) < 1e-3);
        prev_phi = p;
        prev_a = a;
    }
}
