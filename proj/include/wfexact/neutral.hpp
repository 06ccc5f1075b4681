#pragma once

#include <memory>
#include <span>
#include <vector>

#include "wfexact/ancestral.hpp"
#include "wfexact/model.hpp"
#include "wfexact/rng.hpp"

namespace wf {

struct NeutralOptions {
    AncestralOptions ancestral;
    // Gate on the certified relative truncation of the bridge mixture (the
    // single knowingly non-exact step besides the opt-in small-t fallback).
    // The achieved bound is usually far smaller (~1e-11 for gaps >= 0.25);
    // this default keeps steps with gaps near t_min admissible, where the
    // alternating-series rounding floor dominates the certificate.
    double bridge_eps = 1e-5;
    // Cap on mixture components assembled per bridge step.
    std::size_t table_budget = 8'000'000;
    // Below this gap the block counts (~2/gap) make any mixture table
    // infeasible; with the fallback enabled the conditional value is drawn
    // from a moment-matched beta (Brownian-bridge mean and variance with the
    // local diffusion coefficient).  Affects ~1e-3 of thinning points in
    // typical runs.
    double bridge_local_floor = 0.01;
};

// log of the m-conditioned transition density
//   p(m, x, y) = sum_l Binom(l; m, x) Beta(y; theta_a + l, theta_A + m - l).
// one_minus_y is passed separately so accuracy survives y near 1.
double log_density_given_m(int m, double x, double y, double one_minus_y,
                           const MutationRates& mu);
double density_given_m(int m, double x, double y, const MutationRates& mu);

// Monte Carlo density estimate from block-count draws (mean over draws).
double transition_density_estimate(double x, double y, std::span<const int> m_draws,
                                   const MutationRates& mu);
double log_transition_density_estimate(double x, double y, std::span<const int> m_draws,
                                       const MutationRates& mu);

// Deterministic double-series evaluation with certified truncation error
// below tol (absolute).  Test/audit oracle; exact regime only.  Pass
// one_minus_y when y sits within an ulp of 1.
double transition_density_oracle(double x, double y, double t, const MutationRates& mu,
                                 double tol, const AncestralOptions& opts = {},
                                 double one_minus_y = -1.0);

struct TransitionDraw {
    int m;
    int l;
    double y;
    double one_minus_y;
};

// Exact draw from the neutral transition law p(x, . ; t).  The series object
// carries (t, theta) and its cached terms.
TransitionDraw sample_transition(double x, AncestralSeries& series, const MutationRates& mu,
                                 RngStream& rng);

// Sampled path skeleton between two pinned endpoints.
struct BridgeSkeleton {
    double x = 0.0;  // value at time 0
    double y = 0.0;  // value at time t
    double t = 0.0;
    std::vector<double> times;   // strictly increasing, inside (0,t)
    std::vector<double> values;  // strictly inside (0,1)
};

// One conditional step of the bridge: the law of the value at gap s from u,
// given the terminal value y at gap s + r.  Draws from the four-index
// binomial-beta mixture with certified truncation.  The sampler owns the
// assembled mixture, so repeated draws at the same geometry are cheap;
// sampling is const and safe from multiple threads with distinct streams.
class BridgeStepSampler {
  public:
    // Endpoint complements keep near-boundary states accurate; negative
    // arguments mean "compute 1 - value here".
    BridgeStepSampler(double u, double y, double s, double r, const MutationRates& mu,
                      const NeutralOptions& opts, double one_minus_u = -1.0,
                      double one_minus_y = -1.0);
    ~BridgeStepSampler();
    BridgeStepSampler(BridgeStepSampler&&) noexcept;
    BridgeStepSampler& operator=(BridgeStepSampler&&) noexcept;

    double sample(RngStream& rng) const;
    RngStream::BetaDraw sample_pair(RngStream& rng) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

double sample_bridge_point(double u, double y, double s, double r, const MutationRates& mu,
                           RngStream& rng, const NeutralOptions& opts);

// Neutral bridge values at the given interior times (sequential
// conditioning, left to right).
BridgeSkeleton sample_bridge_skeleton(double x, double y, double t,
                                      std::span<const double> times, const MutationRates& mu,
                                      RngStream& rng, const NeutralOptions& opts,
                                      double one_minus_x = -1.0, double one_minus_y = -1.0);

// Independent per-locus neutral bridges sharing one time set.
std::vector<BridgeSkeleton> sample_joint_bridge(std::span<const double> x,
                                                std::span<const double> y, double t,
                                                std::span<const double> times,
                                                const MutationRates& mu, RngStream& rng,
                                                const NeutralOptions& opts,
                                                std::span<const double> one_minus_x = {},
                                                std::span<const double> one_minus_y = {});

}  // namespace wf
