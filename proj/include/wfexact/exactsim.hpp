#pragma once

#include <span>
#include <vector>

#include "wfexact/model.hpp"
#include "wfexact/neutral.hpp"
#include "wfexact/rng.hpp"
#include "wfexact/series.hpp"

namespace wf {

struct MarkedPoissonSample {
    double rate = 0.0;
    double horizon = 0.0;
    std::vector<double> times;  // sorted, inside (0, horizon)
    std::vector<double> marks;  // uniform (0,1); empty in mark-free mode
};

MarkedPoissonSample sample_marked_poisson(double rate, double horizon, bool with_marks,
                                          RngStream& rng);

// Accepts iff every marked point lies on or above the normalized exponent
//   g(state) = (phi(state) - phi_minus) / (phi_plus - phi_minus),
// i.e. the thinned point count below the graph is zero.  A zero-width phi
// span means phi is constant and every proposal is accepted.
bool acceptance_indicator(const SelectionModel& model, std::span<const double> theta,
                          std::span<const double> states,  // K x loci, row-major
                          std::span<const double> marks, const PhiBounds& bounds);

// Skeleton of an L-locus path pinned at both ends, sampled under selection.
struct PathSkeleton {
    int loci = 1;
    double t = 0.0;
    std::vector<double> x, y;     // endpoint states
    std::vector<double> times;    // Poisson skeleton times
    std::vector<double> values;   // times.size() x loci, row-major
    long proposals = 0;           // accepted-run rejection diagnostics
};

struct SimOptions {
    NeutralOptions neutral;
    long rejection_budget = 1'000'000;
};

// Rejection sampling of a conditioned path skeleton (selection-tilted bridge):
// propose a marked Poisson set at the phi-span rate plus a neutral bridge at
// its times, accept by the indicator.
PathSkeleton sample_conditioned_path(const SelectionModel& model, std::span<const double> theta,
                                     std::span<const double> x, std::span<const double> y,
                                     double t, RngStream& rng, const SimOptions& opts);

// Exact simulation of the selected diffusion at the given observation times,
// chained per increment: neutral endpoint proposal + neutral bridge fill,
// accepted through the thinning indicator and the endpoint potential coin.
ObservationSeries simulate_path(const SelectionModel& model, std::span<const double> theta,
                                std::span<const double> x0, std::span<const double> obs_times,
                                RngStream& rng, const SimOptions& opts,
                                long* total_proposals = nullptr);

}  // namespace wf
