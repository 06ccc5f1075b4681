#include "wfexact/model.hpp"

#include <algorithm>
#include <cmath>

namespace wf {

ParameterDomain::ParameterDomain(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
    if (lower.empty() || lower.size() != upper.size())
        throw ConfigError("parameter domain: lower/upper must be nonempty and equally sized");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (!std::isfinite(lower[i]) || !std::isfinite(upper[i]) || lower[i] > upper[i])
            throw ConfigError("parameter domain: need finite lower <= upper in every component");
    }
}

bool ParameterDomain::contains(std::span<const double> theta, double slack) const {
    if (theta.size() != lower.size()) return false;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (theta[i] < lower[i] - slack || theta[i] > upper[i] + slack) return false;
    }
    return true;
}

std::vector<double> ParameterDomain::center() const {
    std::vector<double> c(lower.size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
    return c;
}

double phi_scalar_generic(double x, double eta, double eta_prime, const MutationRates& mu) {
    return 0.5 * (x * (1.0 - x) * (eta * eta + eta_prime) + 2.0 * eta * mu.alpha(x));
}

void HaploidModel::eta(std::span<const double>, std::span<const double> theta,
                       std::span<double> out) const {
    out[0] = 0.5 * theta[0];
}

double HaploidModel::phi(std::span<const double> x, std::span<const double> theta) const {
    const double v = theta[0];
    return 0.5 * (x[0] * (1.0 - x[0]) * v * v * 0.25 + v * mu_.alpha(x[0]));
}

double HaploidModel::girsanov_A(std::span<const double> x, std::span<const double> theta) const {
    return 0.5 * theta[0] * x[0];
}

PhiBounds HaploidModel::phi_bounds(std::span<const double> theta) const {
    const double v = theta[0];
    if (v == 0.0) return {0.0, 0.0};
    const double ta = mu_.theta_a, tA = mu_.theta_A, th = mu_.theta();
    const double k2 = 0.25 * v * ta;   // phi(0)
    const double k3 = -0.25 * v * tA;  // phi(1)
    double lo = std::min(k2, k3);
    double hi = std::max(k2, k3);
    // phi is a downward parabola in x; its vertex only matters when the
    // abscissa 1/2 - theta_total/v falls inside [0,1].
    const double vx = 0.5 - th / v;
    if (vx >= 0.0 && vx <= 1.0) {
        const double k1 = (v * v + 4.0 * v * (ta - tA) + 4.0 * th * th) / 32.0;
        hi = std::max(hi, k1);
        lo = std::min(lo, k1);
    }
    return {lo, hi};
}

double HaploidModel::a_plus(std::span<const double> theta) const {
    // A(x) = theta x / 2 is linear: the max sits at an endpoint.
    return std::max(0.0, 0.5 * theta[0]);
}

double HaploidModel::sam_rate(const ParameterDomain& domain) const {
    if (domain.dim() != 1) throw ConfigError("haploid sam_rate: domain must be scalar");
    // theta -> phi_plus(theta) is a sup of convex quadratics, hence convex;
    // -phi_minus is the max of two linear maps.  The span is convex, so the
    // supremum over an interval is attained at an endpoint.
    double best = 0.0;
    for (double v : {domain.lower[0], domain.upper[0]}) {
        PhiBounds b = phi_bounds({&v, 1});
        best = std::max(best, b.hi - b.lo);
    }
    return best;
}

}  // namespace wf
