#pragma once

#include <functional>
#include <span>
#include <vector>

#include "wfexact/likelihood.hpp"
#include "wfexact/model.hpp"
#include "wfexact/series.hpp"

namespace wf {

struct MleResult {
    std::vector<double> theta_hat;
    double log_lik = 0.0;
    int evaluations = 0;
    bool converged = false;
    std::vector<double> bootstrap_se;  // empty unless bootstrap ran
};

struct OptimOptions {
    double xtol = 1e-6;
    int max_eval = 500;
    int multistart = 3;  // simplex only
};

// Derivative-free scalar maximization on [a,b]: golden-section search with
// successive parabolic interpolation.  Never evaluates outside [a,b].
MleResult brent_maximize(const std::function<double(double)>& f, double a, double b, double xtol,
                         int max_eval);

// Nelder-Mead with projection onto the box; converges when the simplex
// diameter drops below xtol.
MleResult simplex_maximize(const std::function<double(std::span<const double>)>& f,
                           const ParameterDomain& box, std::span<const double> start, double xtol,
                           int max_eval);

// Maximize a frozen-draw likelihood over its domain: Brent for scalar
// parameters, multistart simplex otherwise.
MleResult maximize_likelihood(const SamLikelihood& lik, const OptimOptions& opts,
                              std::uint64_t seed);

struct EstimateOptions {
    int n_samples = 100;
    std::uint64_t seed = 1;
    NeutralOptions neutral;
    OptimOptions optim;
    int threads = 1;
    int bootstrap_B = 0;  // 0 = no bootstrap
    bool bootstrap_resample_observations = false;
};

// Freeze draws for the whole series with rho = sam_rate over the domain,
// then maximize; deterministic given the seed.
MleResult estimate_mle(const SelectionModel& model, const ParameterDomain& domain,
                       const ObservationSeries& series, const EstimateOptions& opts);

// Bootstrap standard error per component.  The default resampling unit is
// the Monte Carlo sample index within each contribution; resampling whole
// observation increments is available behind the option flag.
std::vector<double> bootstrap_se(const SamLikelihood& lik, int replicates,
                                 const OptimOptions& optim, std::uint64_t seed, int threads,
                                 bool resample_observations = false,
                                 std::vector<std::vector<double>>* replicate_thetas = nullptr);

}  // namespace wf
