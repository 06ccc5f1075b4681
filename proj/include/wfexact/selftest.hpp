#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wfexact/series.hpp"

namespace wf::selftest {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;  // measured statistic vs threshold
};

// Fixed-seed benchmark dataset: haploid, theta_a = theta_A = 0.02,
// theta = 0.7, n increments of length 1.
ObservationSeries benchmark_series(int n_increments, std::uint64_t seed);

// Individual audits.  `full` selects the acceptance-scale sizes; the quick
// variants shrink sample counts to a few seconds total.
CheckResult block_sampler_exactness(bool full);
CheckResult density_unbiasedness(bool full);
CheckResult bridge_marginal_law(bool full);
CheckResult girsanov_unit_mass(bool full, int threads);
CheckResult neutral_reduction();
CheckResult benchmark_trend(bool full, int threads);
CheckResult coupled_factorization(bool full, int threads);
CheckResult sam_continuity(bool full, int threads);

std::vector<CheckResult> run_quick(int threads);
std::vector<CheckResult> run_full(int threads);

}  // namespace wf::selftest
