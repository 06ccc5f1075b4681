#pragma once

#include <optional>
#include <vector>

#include "wfexact/errors.hpp"
#include "wfexact/rng.hpp"

namespace wf {

struct AncestralOptions {
    // Below t_min the alternating series cancels catastrophically in doubles
    // (the largest term reaches ~e^27 at t=0.05 against pmf values of ~0.1);
    // the sampler refuses unless the labeled Gaussian fallback is enabled.
    double t_min = 0.1;
    bool approx_small_t = false;
    // Series terms allowed per q_m refinement before declaring non-convergence.
    int term_budget = 10000;
    // Largest block count entertained by the sampler / weight tables.
    int m_budget = 4096;
};

// log |b_k(m)| for the series q_m(t) = sum_{k>=m} (-1)^{k-m} b_k(m).
// The degenerate m=0,k=0 coefficient equals 1 by the gamma recurrence.
double log_b(int m, int k, double t, double theta);

// Moment-matched Gaussian approximation of the block count for small t
// (Griffiths' asymptotics); used only by the opt-in fallback.
struct BlockCountGaussian {
    double mean;
    double sd;
};
BlockCountGaussian block_count_gaussian(double t, double theta);

// Certified per-m weights: w[m] approximates q_m within half_width[m], and
// the mass not covered by w is at most tail_bound.
struct QWeights {
    std::vector<double> w;
    std::vector<double> half_width;
    double tail_bound = 0.0;
    bool approximate = false;
};

// Evaluation and exact sampling of the block-count law at fixed (t, theta).
// Series terms are cached across calls, so reuse one instance for repeated
// draws at the same time increment.  Not safe for concurrent use; distinct
// instances are independent.
class AncestralSeries {
  public:
    AncestralSeries(double t, double theta, AncestralOptions opts = {});

    double t() const { return t_; }
    double theta() const { return theta_; }
    const AncestralOptions& options() const { return opts_; }
    bool approximate() const { return approx_; }

    // Certified q_m within tol (exact regime only).
    double pmf(int m, double tol);

    // Valid bracket [lo,hi] for q_m; tightens as refinement grows.
    struct Bracket {
        double lo;
        double hi;
    };
    Bracket bracket(int m, int refinement);

    // Refine until the width reaches tol, the rounding floor (series
    // oscillation below the accumulated error margin), or the term budget.
    Bracket refined_bracket(int m, double tol);

    // Index k0(m) past which the series terms are certified strictly
    // decreasing, so partial sums bracket the limit.
    int decrease_threshold(int m);

    // Exact draw of M (alternating-series inversion), or the labeled
    // Gaussian-discretized draw when t < t_min and the fallback is enabled.
    int sample(RngStream& rng);

    // Weight table covering all but tail_tol of the mass, each entry within
    // term_tol.  Uses the discretized Gaussian in the fallback regime.
    QWeights weights(double tail_tol, double term_tol);

  private:
    struct Row {
        int k0 = -1;
        std::vector<double> partial;  // partial sums S_m..S_K
        std::vector<double> abs_err;  // accumulated rounding margin
    };

    void extend(int m, int k_target);
    Row& row(int m);

    double t_;
    double theta_;
    AncestralOptions opts_;
    bool approx_;
    std::vector<Row> rows_;
    std::vector<double> gaussian_pmf_;  // fallback weights, lazily built
    void ensure_gaussian();
};

// One-shot conveniences.
double q_pmf_oracle(int m, double t, double theta, double tol, const AncestralOptions& opts = {});
int sample_block_count(double t, double theta, RngStream& rng, const AncestralOptions& opts = {});

}  // namespace wf
