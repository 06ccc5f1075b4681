#include "wfexact/rng.hpp"

#include <cmath>

namespace wf {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 output mixer (Steele, Lea, Flood 2014).
std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

RngStream RngStream::derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t key = mix64(seed + kGolden);
    for (std::uint64_t id : path) {
        key = mix64(key ^ mix64(id + kGolden));
    }
    return RngStream(key);
}

std::uint64_t RngStream::next_u64() {
    state_ += kGolden;
    return mix64(state_);
}

double RngStream::uniform() {
    // 53 random bits, centered: (k + 0.5) * 2^-53 in (0,1).
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform_co() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::exponential(double rate) {
    return -std::log(uniform()) / rate;
}

double RngStream::normal() {
    // Box-Muller; the sine branch is discarded to keep the stream stateless.
    double u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

double RngStream::log_gamma_variate(double shape) {
    if (shape < 1.0) {
        // Gamma(a) = Gamma(a+1) * U^{1/a}; the power is kept in log space.
        double lg = log_gamma_variate(shape + 1.0);
        return lg + std::log(uniform()) / shape;
    }
    // Marsaglia-Tsang squeeze-free rejection.
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal();
        double t = 1.0 + c * x;
        if (t <= 0.0) continue;
        double v = t * t * t;
        double u = uniform();
        double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return std::log(d * v);
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return std::log(d * v);
    }
}

RngStream::BetaDraw RngStream::beta(double a, double b) {
    // The pair (y, 1-y) represents the draw: with shapes below one the beta
    // piles mass within one ulp of a boundary, so y alone may round to 1.0
    // (or 1-y to 1.0) while its complement still carries the value.  Only a
    // complement underflowing to exactly 0 is redrawn, an event of
    // probability ~ (1e-308)^shape.
    for (;;) {
        double lg1 = log_gamma_variate(a);
        double lg2 = log_gamma_variate(b);
        double d = lg1 - lg2;  // log(G1/G2)
        double y, omy;
        if (d >= 0.0) {
            double r = std::exp(-d);        // G2/G1 <= 1
            y = 1.0 / (1.0 + r);
            omy = r / (1.0 + r);
        } else {
            double r = std::exp(d);         // G1/G2 < 1
            y = r / (1.0 + r);
            omy = 1.0 / (1.0 + r);
        }
        if (y > 0.0 && omy > 0.0) return {y, omy};
    }
}

int RngStream::binomial(int n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);
    // Inverse CDF with the pmf recurrence; stable because p <= 1/2.
    double u = uniform();
    double odds = p / (1.0 - p);
    double pmf = std::pow(1.0 - p, n);
    double cdf = pmf;
    int k = 0;
    while (u > cdf && k < n) {
        pmf *= odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
        ++k;
        cdf += pmf;
    }
    return k;
}

std::vector<double> RngStream::poisson_times(double rate, double horizon) {
    std::vector<double> times;
    if (rate <= 0.0) return times;
    double t = exponential(rate);
    while (t < horizon) {
        times.push_back(t);
        t += exponential(rate);
    }
    return times;
}

}  // namespace wf
