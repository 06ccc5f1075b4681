#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wfexact/model.hpp"
#include "wfexact/neutral.hpp"
#include "wfexact/rng.hpp"
#include "wfexact/series.hpp"

namespace wf {

// Frozen random element for one observation increment: everything the
// estimator needs to evaluate its contribution at any theta in the domain,
// drawn once, independent of theta.
struct ContributionDraws {
    int loci = 1;
    double t = 0.0;
    std::vector<double> x, y;  // endpoint states per locus
    int n_samples = 0;

    // Block-count draws, (n_samples x loci) row-major, plus the cached
    // theta-free log density factor per sample.
    std::vector<int> m_draws;
    std::vector<double> log_density;

    // One thinning block per separable factor (per locus for separable
    // families, a single joint block otherwise).
    struct Block {
        std::vector<int> loci_ids;
        double rho = 0.0;
        std::vector<int> offsets;    // n_samples + 1 prefix offsets into times
        std::vector<double> times;   // concatenated Poisson times
        std::vector<double> values;  // concatenated bridge states, x loci_ids.size()
    };
    std::vector<Block> blocks;
};

struct LikelihoodEstimate {
    double log_value = 0.0;
    std::vector<double> per_contribution;  // log contribution per increment
    std::vector<double> theta;
    bool underflow = false;  // some contribution estimated as zero
};

struct DrawStats {
    std::size_t poisson_points = 0;
    std::size_t stored_values = 0;
};

// Freeze the random element of one contribution.  Streams are derived from
// (seed, purpose, contribution_index, sample, block/locus), so draws are
// independent of evaluation order and thread count.
ContributionDraws draw_contribution(const SelectionModel& model, const ParameterDomain& domain,
                                    std::span<const double> x, std::span<const double> y,
                                    double t, int n_samples, std::uint64_t seed,
                                    std::uint64_t contribution_index, const NeutralOptions& opts,
                                    DrawStats* stats = nullptr);

// All increments of a series, optionally in parallel.
std::vector<ContributionDraws> draw_all_contributions(const SelectionModel& model,
                                                      const ParameterDomain& domain,
                                                      const ObservationSeries& series,
                                                      int n_samples, std::uint64_t seed,
                                                      const NeutralOptions& opts, int threads,
                                                      DrawStats* stats = nullptr);

// Mean over samples of the per-sample thinning products; always in [0,1].
double a_estimate(const ContributionDraws& draws, const SelectionModel& model,
                  std::span<const double> theta, const ParameterDomain& domain);

// log of the unbiased contribution estimate
//   exp{A(y)-A(x)-t phi_minus} * density_mean * a_mean.
double log_contribution_estimate(const ContributionDraws& draws, const SelectionModel& model,
                                 std::span<const double> theta, const ParameterDomain& domain);

// Frozen-draw log likelihood over all increments, continuous in theta.
// The theta-free density factor is cached at construction; a bootstrap
// resample of Monte Carlo sample indices may be installed per instance.
class SamLikelihood {
  public:
    SamLikelihood(const SelectionModel& model, const ParameterDomain& domain,
                  std::shared_ptr<const std::vector<ContributionDraws>> draws);

    // Resample (with replacement) of sample indices, one vector per
    // contribution; empty means the identity sample.
    void set_resample(std::vector<std::vector<int>> resample);

    // Integer weight per contribution (observation-level bootstrap); empty
    // means weight one everywhere.
    void set_observation_weights(std::vector<int> weights);

    double log_lik(std::span<const double> theta) const;
    LikelihoodEstimate evaluate(std::span<const double> theta) const;

    const SelectionModel& model() const { return model_; }
    const ParameterDomain& domain() const { return domain_; }
    const std::vector<ContributionDraws>& draws() const { return *draws_; }

  private:
    double contribution_log(std::size_t i, std::span<const double> theta) const;
    void rebuild_density_cache();

    const SelectionModel& model_;
    ParameterDomain domain_;
    std::shared_ptr<const std::vector<ContributionDraws>> draws_;
    std::vector<std::vector<int>> resample_;
    std::vector<int> observation_weights_;
    std::vector<double> cached_log_density_;  // per contribution, theta-free
};

// Versioned cache file for frozen draws (bit-exact round trip).
void save_draws(const std::string& path, const std::vector<ContributionDraws>& draws,
                std::uint64_t seed, double theta_a, double theta_A);
std::vector<ContributionDraws> load_draws(const std::string& path, std::uint64_t* seed = nullptr,
                                          double* theta_a = nullptr, double* theta_A = nullptr);

}  // namespace wf
