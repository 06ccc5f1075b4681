#pragma once

#include <cstdint>
#include <initializer_list>
#include <vector>

namespace wf {

// Counter-based random stream.
//
// Every stream is addressed by a key derived from (master seed, purpose tag,
// index path).  Streams with distinct keys are statistically independent, and
// a draw depends only on its stream key and position, never on evaluation
// order or thread scheduling.  The generator is SplitMix64: a Weyl counter
// plus a strong 64-bit mixer.
class RngStream {
  public:
    explicit RngStream(std::uint64_t key) : state_(key) {}

    // Derive a stream key from a master seed and an index path, e.g.
    // {PURPOSE_M, contribution, sample}.
    static RngStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

    std::uint64_t next_u64();

    // Uniform on the open interval (0,1); never returns 0 or 1, so logs are safe.
    double uniform();

    // Uniform on [0,1).
    double uniform_co();

    double exponential(double rate);
    double normal();

    // log of a Gamma(shape, 1) variate; valid for any shape > 0 and immune to
    // underflow for tiny shapes (Marsaglia-Tsang, with the boosting identity
    // for shape < 1).
    double log_gamma_variate(double shape);

    // Beta(a,b) variate together with its complement, both exact to double
    // rounding; y is guaranteed strictly inside (0,1) (draws whose value
    // rounds to a boundary are redrawn).
    struct BetaDraw {
        double y;
        double one_minus_y;
    };
    BetaDraw beta(double a, double b);

    // Exact inverse-CDF binomial draw.
    int binomial(int n, double p);

    // Arrival times of a Poisson process with the given rate on (0, horizon),
    // in increasing order (exponential inter-arrival construction).
    std::vector<double> poisson_times(double rate, double horizon);

  private:
    std::uint64_t state_;
};

// Purpose tags for stream derivation.  Fixed numbering is part of the
// reproducibility contract: cache files replay only with matching tags.
namespace stream {
inline constexpr std::uint64_t kAncestral = 1;   // M draws
inline constexpr std::uint64_t kPoisson = 2;     // thinning time sets
inline constexpr std::uint64_t kBridge = 3;      // neutral bridge fills
inline constexpr std::uint64_t kTransition = 4;  // unconditioned increments
inline constexpr std::uint64_t kAccept = 5;      // accept/reject coins
inline constexpr std::uint64_t kBootstrap = 6;   // bootstrap resampling
inline constexpr std::uint64_t kOptimizer = 7;   // multistart points
inline constexpr std::uint64_t kSelftest = 8;    // built-in audits
}  // namespace stream

}  // namespace wf
