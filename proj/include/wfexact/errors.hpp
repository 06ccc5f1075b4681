#pragma once

#include <stdexcept>
#include <string>

namespace wf {

// Base for every error the library raises on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A time increment is below the exact-series regime and the approximate
// fallback was not enabled.
struct TimeTooSmall : Error {
    explicit TimeTooSmall(double t, double t_min)
        : Error("time increment " + std::to_string(t) + " is below t_min=" +
                std::to_string(t_min) +
                " for exact series evaluation (enable approx_small_t to use the "
                "labeled Gaussian fallback)"),
          t(t), t_min(t_min) {}
    double t;
    double t_min;
};

// The certified tail bound of a truncated mixture could not be reached
// within the configured term budget.
struct TruncationBudget : Error {
    explicit TruncationBudget(const std::string& what) : Error(what) {}
};

// A rejection sampler exhausted its proposal budget.
struct RejectionBudget : Error {
    explicit RejectionBudget(const std::string& what) : Error(what) {}
};

// An optimizer exhausted its evaluation budget (result still returned,
// carried alongside converged=false; thrown only on hard misuse).
struct MaxEvaluations : Error {
    explicit MaxEvaluations(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

struct DataError : Error {
    explicit DataError(const std::string& what) : Error(what) {}
};

}  // namespace wf
