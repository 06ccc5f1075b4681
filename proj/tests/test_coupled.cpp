#include <doctest.h>

#include <array>
#include <cmath>
#include <vector>

#include "wfexact/coupled.hpp"
#include "wfexact/neutral.hpp"
#include "wfexact/rng.hpp"

using namespace wf;

namespace {
const MutationRates kMu(0.02, 0.02);

// raw tensors for a symmetric two-locus interaction
std::vector<double> raw_s() { return {0.30, 0.05, 0.20, 0.10}; }
std::vector<double> raw_h() {
    // h[k][l][j][r], L = 2; zero diagonal; symmetric h[0][1][j][r] = h[1][0][r][j]
    std::vector<double> h(16, 0.0);
    auto at = [&](int k, int l, int j, int r) -> double& {
        return h[((k * 2 + l) * 2 + j) * 2 + r];
    };
    at(0, 1, 0, 0) = 0.04;
    at(0, 1, 0, 1) = -0.02;
    at(0, 1, 1, 0) = 0.01;
    at(0, 1, 1, 1) = 0.03;
    at(1, 0, 0, 0) = 0.04;   // = h[0][1][0][0]
    at(1, 0, 1, 0) = -0.02;  // = h[0][1][0][1]
    at(1, 0, 0, 1) = 0.01;   // = h[0][1][1][0]
    at(1, 0, 1, 1) = 0.03;   // = h[0][1][1][1]
    return h;
}
}  // namespace

TEST_CASE("raw parameter reduction and symmetry enforcement") {
    std::vector<double> theta = reduce_coupled_parameters(2, raw_s(), raw_h(), true);
    // c_k = s_k1 - s_k2 + (h^{kl}_{12} - h^{kl}_{22})
    CHECK(theta[0] == doctest::Approx(0.25 + (-0.02 - 0.03)).epsilon(1e-14));
    CHECK(theta[1] == doctest::Approx(0.10 + (0.01 - 0.03)).epsilon(1e-14));
    // d = h11 - h12 - h21 + h22
    CHECK(theta[2] == doctest::Approx(0.04 + 0.02 - 0.01 + 0.03).epsilon(1e-14));

    std::vector<double> broken = raw_h();
    broken[((0 * 2 + 1) * 2 + 0) * 2 + 1] += 0.01;  // h[0][1][0][1], no mirrored change
    CHECK_THROWS_AS(reduce_coupled_parameters(2, raw_s(), broken, true), ConfigError);
    // nonzero interactions demand the free family
    CHECK_THROWS_AS(reduce_coupled_parameters(2, raw_s(), raw_h(), false), ConfigError);
}

TEST_CASE("coupling term: zeros and an independent expansion") {
    CoupledModel model(2, kMu, true);
    std::vector<double> theta = reduce_coupled_parameters(2, raw_s(), raw_h(), true);

    // boundary coordinates kill their component
    std::array xb{0.0, 0.5};
    std::array g{0.0, 0.0};
    model.coupling_term(xb, theta, g);
    CHECK(g[0] == 0.0);

    // no selection differences: G vanishes identically
    CoupledModel plain(2, kMu, false);
    std::vector<double> z = {0.0, 0.0};
    std::array xi{0.3, 0.8};
    std::array g2{1.0, 1.0};
    plain.coupling_term(xi, z, g2);
    CHECK(g2[0] == 0.0);
    CHECK(g2[1] == 0.0);

    // independent symbolic expansion at a spot value
    std::array x{0.3, 0.8};
    model.coupling_term(x, theta, g);
    double v0 = (0.30 - 0.05) + (-0.02 - 0.03) + (0.04 + 0.02 - 0.01 + 0.03) * 0.8;
    double v1 = (0.20 - 0.10) + (0.01 - 0.03) + (0.04 + 0.02 - 0.01 + 0.03) * 0.3;
    CHECK(g[0] == doctest::Approx(0.3 * 0.7 * v0).epsilon(1e-13));
    CHECK(g[1] == doctest::Approx(0.8 * 0.2 * v1).epsilon(1e-13));
}

TEST_CASE("potential: finite-difference gradient of A recovers the drift") {
    CoupledModel model(3, kMu, true);
    std::vector<double> theta(model.theta_dim());
    RngStream rng = RngStream::derive(61, {1});
    for (double& v : theta) v = rng.uniform() - 0.5;
    const double h = 1e-6;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(3);
        for (double& v : x) v = 0.05 + 0.9 * rng.uniform();
        std::vector<double> eta(3);
        model.eta(x, theta, eta);
        for (int k = 0; k < 3; ++k) {
            std::vector<double> xp = x, xm = x;
            xp[k] += h;
            xm[k] -= h;
            double fd = (model.girsanov_A(xp, theta) - model.girsanov_A(xm, theta)) / (2 * h);
            CHECK(fd == doctest::Approx(eta[k]).epsilon(1e-6));
        }
    }
}

TEST_CASE("interval bounds contain phi on a dense grid; rate dominates the span") {
    CoupledModel model(2, kMu, true);
    RngStream rng = RngStream::derive(62, {1});
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> theta(model.theta_dim());
        for (double& v : theta) v = 2.0 * rng.uniform() - 1.0;
        PhiBounds pb = model.phi_bounds(theta);
        for (int i = 0; i <= 50; ++i)
            for (int j = 0; j <= 50; ++j) {
                std::array x{i / 50.0, j / 50.0};
                double p = model.phi(x, theta);
                CHECK(p >= pb.lo - 1e-12);
                CHECK(p <= pb.hi + 1e-12);
            }
    }

    ParameterDomain box({-0.5, -0.5, -0.2}, {0.5, 0.5, 0.2});
    double rate = model.sam_rate(box);
    for (int g = 0; g < 200; ++g) {
        std::vector<double> theta = {box.lower[0] + rng.uniform(), box.lower[1] + rng.uniform(),
                                     box.lower[2] + 0.4 * rng.uniform()};
        PhiBounds pb = model.phi_bounds(theta);
        CHECK(rate >= pb.hi - pb.lo - 1e-12);
    }
}

TEST_CASE("separable family: phi splits into haploid pieces (theta_k = 2 c_k)") {
    CoupledModel model(2, kMu, false);
    HaploidModel hap(kMu);
    std::vector<double> c = {0.35, -0.12};
    for (int i = 0; i <= 30; ++i)
        for (int j = 0; j <= 30; ++j) {
            std::array x{i / 30.0, j / 30.0};
            double whole = model.phi(x, c);
            double split = hap.phi1(x[0], 2.0 * c[0]) + hap.phi1(x[1], 2.0 * c[1]);
            CHECK(whole == doctest::Approx(split).epsilon(1e-12));
            CHECK(model.locus_phi(0, x[0], c) ==
                  doctest::Approx(hap.phi1(x[0], 2.0 * c[0])).epsilon(1e-13));
        }
    PhiBounds pb = model.locus_phi_bounds(0, c);
    PhiBounds hb = hap.phi_bounds1(0.7);
    CHECK(pb.lo == hb.lo);
    CHECK(pb.hi == hb.hi);
}

TEST_CASE("joint bridge: scalar reduction and weak cross-locus independence") {
    NeutralOptions opts;
    std::array x{0.3, 0.6}, y{0.5, 0.4};
    std::vector<double> times = {0.5};
    RngStream r1 = RngStream::derive(63, {1});
    RngStream r2 = RngStream::derive(63, {1});
    auto joint = sample_joint_bridge(x, y, 1.0, times, kMu, r1, opts);
    BridgeSkeleton solo = sample_bridge_skeleton(x[0], y[0], 1.0, times, kMu, r2, opts);
    CHECK(joint.size() == 2);
    CHECK(joint[0].values[0] == solo.values[0]);  // same stream, same draw

    // cross-locus midpoint correlation compatible with zero
    BridgeStepSampler s0(x[0], y[0], 0.5, 0.5, kMu, opts);
    BridgeStepSampler s1(x[1], y[1], 0.5, 0.5, kMu, opts);
    const int n = 4000;
    RngStream ra = RngStream::derive(64, {1});
    RngStream rb = RngStream::derive(64, {2});
    double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
    for (int i = 0; i < n; ++i) {
        double a = s0.sample(ra), b = s1.sample(rb);
        sa += a;
        sb += b;
        sab += a * b;
        saa += a * a;
        sbb += b * b;
    }
    double cov = sab / n - (sa / n) * (sb / n);
    double corr = cov / std::sqrt((saa / n - sa / n * sa / n) * (sbb / n - sb / n * sb / n));
    CHECK(std::fabs(corr) < 3.0 / std::sqrt(static_cast<double>(n)));
}
