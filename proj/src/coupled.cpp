#include "wfexact/coupled.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace wf {

namespace {

// Closed interval arithmetic, enough for products of bounded factors.
struct Interval {
    double lo;
    double hi;

    static Interval point(double v) { return {v, v}; }
    Interval operator+(const Interval& o) const { return {lo + o.lo, hi + o.hi}; }
    Interval operator*(const Interval& o) const {
        double c[4] = {lo * o.lo, lo * o.hi, hi * o.lo, hi * o.hi};
        return {*std::min_element(c, c + 4), *std::max_element(c, c + 4)};
    }
    Interval square() const {
        double a = lo * lo, b = hi * hi;
        double mx = std::max(a, b);
        double mn = (lo <= 0.0 && hi >= 0.0) ? 0.0 : std::min(a, b);
        return {mn, mx};
    }
};

// phi interval over x in [0,1]^L for (possibly interval-valued) parameters.
Interval phi_interval(int L, const MutationRates& mu, const std::vector<Interval>& c,
                      const std::vector<std::vector<Interval>>& d) {
    const Interval unit{0.0, 1.0};
    const Interval quarter{0.0, 0.25};                       // x(1-x)
    const Interval alpha{mu.alpha(1.0), mu.alpha(0.0)};      // alpha is decreasing
    Interval total{0.0, 0.0};
    for (int k = 0; k < L; ++k) {
        Interval v = c[k];
        for (int l = 0; l < L; ++l) {
            if (l == k) continue;
            v = v + d[k][l] * unit;
        }
        Interval t1 = (quarter * v.square()) * Interval::point(0.5);
        Interval t2 = v * alpha;
        total = total + t1 + t2;
    }
    return total;
}

}  // namespace

CoupledModel::CoupledModel(int loci, MutationRates mu, bool free_interactions)
    : L_(loci), mu_(mu), free_interactions_(free_interactions) {
    if (loci < 1) throw ConfigError("coupled model needs at least one locus");
    if (loci > 16) throw ConfigError("coupled model limited to 16 loci");
}

int CoupledModel::theta_dim() const {
    return free_interactions_ ? L_ + L_ * (L_ - 1) / 2 : L_;
}

int CoupledModel::d_index(int k, int l) const {
    if (k > l) std::swap(k, l);
    // offset of pair (k,l), pairs ordered (0,1),(0,2),..,(0,L-1),(1,2),..
    return L_ + k * L_ - k * (k + 1) / 2 + (l - k - 1);
}

void CoupledModel::eta(std::span<const double> x, std::span<const double> theta,
                       std::span<double> out) const {
    for (int k = 0; k < L_; ++k) {
        double v = theta[k];
        if (free_interactions_) {
            for (int l = 0; l < L_; ++l) {
                if (l == k) continue;
                v += theta[d_index(k, l)] * x[l];
            }
        }
        out[k] = v;
    }
}

void CoupledModel::coupling_term(std::span<const double> x, std::span<const double> theta,
                                 std::span<double> out) const {
    eta(x, theta, out);
    for (int k = 0; k < L_; ++k) out[k] *= x[k] * (1.0 - x[k]);
}

double CoupledModel::phi(std::span<const double> x, std::span<const double> theta) const {
    double total = 0.0;
    for (int k = 0; k < L_; ++k) {
        double v = theta[k];
        if (free_interactions_) {
            for (int l = 0; l < L_; ++l) {
                if (l == k) continue;
                v += theta[d_index(k, l)] * x[l];
            }
        }
        total += 0.5 * x[k] * (1.0 - x[k]) * v * v + v * mu_.alpha(x[k]);
    }
    return total;
}

double CoupledModel::girsanov_A(std::span<const double> x, std::span<const double> theta) const {
    double total = 0.0;
    for (int k = 0; k < L_; ++k) total += theta[k] * x[k];
    if (free_interactions_) {
        for (int k = 0; k < L_; ++k)
            for (int l = k + 1; l < L_; ++l) total += theta[d_index(k, l)] * x[k] * x[l];
    }
    return total;
}

PhiBounds CoupledModel::phi_bounds(std::span<const double> theta) const {
    std::vector<Interval> c(L_);
    std::vector<std::vector<Interval>> d(L_, std::vector<Interval>(L_, Interval::point(0.0)));
    for (int k = 0; k < L_; ++k) c[k] = Interval::point(theta[k]);
    if (free_interactions_) {
        for (int k = 0; k < L_; ++k)
            for (int l = 0; l < L_; ++l)
                if (l != k) d[k][l] = Interval::point(theta[d_index(k, l)]);
    }
    Interval p = phi_interval(L_, mu_, c, d);
    return {p.lo, p.hi};
}

double CoupledModel::a_plus(std::span<const double> theta) const {
    // A is multilinear in x, so its maximum over the cube sits at a vertex.
    double best = 0.0;  // vertex x = 0 gives A = 0
    std::vector<double> x(L_);
    for (std::uint32_t mask = 0; mask < (1u << L_); ++mask) {
        for (int k = 0; k < L_; ++k) x[k] = (mask >> k) & 1u ? 1.0 : 0.0;
        best = std::max(best, girsanov_A(x, theta));
    }
    return best;
}

double CoupledModel::sam_rate(const ParameterDomain& domain) const {
    if (static_cast<int>(domain.dim()) != theta_dim())
        throw ConfigError("coupled sam_rate: domain dimension mismatch");
    // Extend the phi interval over the whole parameter box: for every theta
    // inside, phi_plus(theta) - phi_minus(theta) <= hi - lo by inclusion.
    std::vector<Interval> c(L_);
    std::vector<std::vector<Interval>> d(L_, std::vector<Interval>(L_, Interval::point(0.0)));
    for (int k = 0; k < L_; ++k) c[k] = {domain.lower[k], domain.upper[k]};
    if (free_interactions_) {
        for (int k = 0; k < L_; ++k)
            for (int l = 0; l < L_; ++l)
                if (l != k) {
                    int i = d_index(k, l);
                    d[k][l] = {domain.lower[i], domain.upper[i]};
                }
    }
    Interval p = phi_interval(L_, mu_, c, d);
    return p.hi - p.lo;
}

double CoupledModel::locus_phi(int k, double x, std::span<const double> theta) const {
    if (free_interactions_) throw Error("locus_phi: model has interactions");
    const double v = theta[k];
    return 0.5 * x * (1.0 - x) * v * v + v * mu_.alpha(x);
}

PhiBounds CoupledModel::locus_phi_bounds(int k, std::span<const double> theta) const {
    if (free_interactions_) throw Error("locus_phi_bounds: model has interactions");
    // The per-locus term matches the haploid phi with scalar parameter 2 c_k,
    // so the analytic parabola bounds apply.
    const double th = locus_scalar_theta(k, theta);
    return HaploidModel(mu_).phi_bounds({&th, 1});
}

double CoupledModel::locus_sam_rate(int k, const ParameterDomain& domain) const {
    if (free_interactions_) throw Error("locus_sam_rate: model has interactions");
    ParameterDomain d = ParameterDomain::scalar(2.0 * domain.lower[k], 2.0 * domain.upper[k]);
    return HaploidModel(mu_).sam_rate(d);
}

std::vector<double> reduce_coupled_parameters(int loci, std::span<const double> s,
                                              std::span<const double> h,
                                              bool free_interactions) {
    const int L = loci;
    if (static_cast<int>(s.size()) != 2 * L)
        throw ConfigError("coupled parameters: s must have L*2 entries");
    if (static_cast<int>(h.size()) != 4 * L * L)
        throw ConfigError("coupled parameters: h must have L*L*2*2 entries");
    auto H = [&](int k, int l, int j, int r) { return h[((k * L + l) * 2 + j) * 2 + r]; };

    for (int k = 0; k < L; ++k)
        for (int l = 0; l < L; ++l) {
            if (l == k) continue;
            for (int j = 0; j < 2; ++j)
                for (int r = 0; r < 2; ++r)
                    if (std::fabs(H(k, l, j, r) - H(l, k, r, j)) > 1e-12)
                        throw ConfigError(
                            "coupled parameters: interaction tensor must satisfy "
                            "h[k][l][j][r] == h[l][k][r][j] (no potential exists otherwise)");
        }

    CoupledModel layout(L, MutationRates(1.0, 1.0), free_interactions);
    std::vector<double> theta(layout.theta_dim(), 0.0);
    for (int k = 0; k < L; ++k) {
        double c = s[2 * k] - s[2 * k + 1];
        for (int l = 0; l < L; ++l) {
            if (l == k) continue;
            c += H(k, l, 0, 1) - H(k, l, 1, 1);
        }
        theta[k] = c;
    }
    for (int k = 0; k < L; ++k)
        for (int l = k + 1; l < L; ++l) {
            double d = H(k, l, 0, 0) - H(k, l, 0, 1) - H(k, l, 1, 0) + H(k, l, 1, 1);
            if (free_interactions) {
                theta[layout.d_index(k, l)] = d;
            } else if (std::fabs(d) > 1e-12) {
                throw ConfigError(
                    "coupled parameters: nonzero pairwise interaction requires "
                    "interactions = free");
            }
        }
    return theta;
}

}  // namespace wf
