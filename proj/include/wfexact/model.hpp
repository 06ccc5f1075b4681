#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wfexact/errors.hpp"

namespace wf {

// Neutral mutation rates; both strictly positive.
struct MutationRates {
    double theta_a;
    double theta_A;

    MutationRates(double a, double A) : theta_a(a), theta_A(A) {
        if (!(a > 0.0) || !(A > 0.0)) throw ConfigError("mutation rates must be strictly positive");
    }
    double theta() const { return theta_a + theta_A; }

    // Mutation drift alpha(x) = (theta_a - theta*x)/2.
    double alpha(double x) const { return 0.5 * (theta_a - theta() * x); }
};

// Compact box of admissible selection parameters.  Degenerate components
// (lower == upper) are allowed; they pin a coordinate.
struct ParameterDomain {
    std::vector<double> lower;
    std::vector<double> upper;

    ParameterDomain(std::vector<double> lo, std::vector<double> hi);
    static ParameterDomain scalar(double lo, double hi) { return ParameterDomain({lo}, {hi}); }

    std::size_t dim() const { return lower.size(); }
    bool contains(std::span<const double> theta, double slack = 1e-12) const;
    std::vector<double> center() const;
};

struct PhiBounds {
    double lo;
    double hi;
};

// Drift decomposition and Girsanov functionals for one selection family.
//
// The state lives in [0,1]^L; the selection parameter theta in a box of
// dimension theta_dim().  Instances are immutable and all methods are pure,
// so concurrent use is safe.
class SelectionModel {
  public:
    virtual ~SelectionModel() = default;

    virtual int loci() const = 0;
    virtual int theta_dim() const = 0;
    virtual const MutationRates& mutation() const = 0;
    virtual std::string name() const = 0;

    // Per-locus selection drift factor: drift = alpha(x^k) + x^k(1-x^k) eta^k.
    virtual void eta(std::span<const double> x, std::span<const double> theta,
                     std::span<double> out) const = 0;

    // Girsanov exponent phi(x) = [eta' D eta + 2 eta' alpha]/2 (+ the eta'
    // derivative term in the scalar case when eta depends on x).
    virtual double phi(std::span<const double> x, std::span<const double> theta) const = 0;

    // Potential of the selection drift: grad A = eta.
    virtual double girsanov_A(std::span<const double> x, std::span<const double> theta) const = 0;

    // Certified bounds of phi over the state cube.
    virtual PhiBounds phi_bounds(std::span<const double> theta) const = 0;

    // Upper bound of girsanov_A over the state cube.
    virtual double a_plus(std::span<const double> theta) const = 0;

    // Dominating thinning rate: a certified upper bound of
    // sup over the domain of (phi_plus - phi_minus).
    virtual double sam_rate(const ParameterDomain& domain) const = 0;

    // True when phi and A separate into per-locus terms for every admissible
    // theta (scalar models, and coupled models without interactions).
    virtual bool separable() const { return loci() == 1; }

    // Per-locus pieces of a separable model; the defaults cover the scalar
    // case.  With a separable family the thinning machinery runs per locus
    // with these tighter bounds instead of the joint interval bound.
    virtual double locus_phi(int k, double x, std::span<const double> theta) const {
        (void)k;
        return phi({&x, 1}, theta);
    }
    virtual PhiBounds locus_phi_bounds(int k, std::span<const double> theta) const {
        (void)k;
        return phi_bounds(theta);
    }
    virtual double locus_sam_rate(int k, const ParameterDomain& domain) const {
        (void)k;
        return sam_rate(domain);
    }
};

// Haploid selection: eta(x) = theta/2, constant in x.
class HaploidModel final : public SelectionModel {
  public:
    explicit HaploidModel(MutationRates mu) : mu_(mu) {}

    int loci() const override { return 1; }
    int theta_dim() const override { return 1; }
    const MutationRates& mutation() const override { return mu_; }
    std::string name() const override { return "haploid"; }

    void eta(std::span<const double> x, std::span<const double> theta,
             std::span<double> out) const override;
    double phi(std::span<const double> x, std::span<const double> theta) const override;
    double girsanov_A(std::span<const double> x, std::span<const double> theta) const override;
    PhiBounds phi_bounds(std::span<const double> theta) const override;
    double a_plus(std::span<const double> theta) const override;
    double sam_rate(const ParameterDomain& domain) const override;

    // Scalar conveniences.
    double phi1(double x, double theta) const { return phi({&x, 1}, {&theta, 1}); }
    PhiBounds phi_bounds1(double theta) const { return phi_bounds({&theta, 1}); }

  private:
    MutationRates mu_;
};

// General assumption-style phi for a scalar model with known eta and eta':
// phi = [x(1-x)(eta^2 + eta') + 2 eta alpha(x)] / 2.  Used as the second
// algebraic route in tests against the specialized closed forms.
double phi_scalar_generic(double x, double eta, double eta_prime, const MutationRates& mu);

}  // namespace wf
