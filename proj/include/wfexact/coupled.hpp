#pragma once

#include "wfexact/model.hpp"

namespace wf {

// Multilocus selection with pairwise interactions.
//
// The drift of locus k is alpha(x^k) + x^k(1-x^k) V^k(x) with
//   V^k(x) = c_k + sum_{l != k} d_{kl} x^l .
// The raw interaction tensor h^{kl}_{jr} enters the law only through the
// aggregates c and d, so the estimation family is parameterized directly by
//   theta = (c_1..c_L [, d_{kl} for k < l])
// with the d block present only when interactions are free.  The symmetric
// matrix d is required for V to be a gradient field, i.e. for the potential
// A to exist.
class CoupledModel final : public SelectionModel {
  public:
    CoupledModel(int loci, MutationRates mu, bool free_interactions);

    int loci() const override { return L_; }
    int theta_dim() const override;
    const MutationRates& mutation() const override { return mu_; }
    std::string name() const override { return "coupled"; }
    bool separable() const override { return !free_interactions_; }
    bool free_interactions() const { return free_interactions_; }

    void eta(std::span<const double> x, std::span<const double> theta,
             std::span<double> out) const override;
    double phi(std::span<const double> x, std::span<const double> theta) const override;
    double girsanov_A(std::span<const double> x, std::span<const double> theta) const override;
    PhiBounds phi_bounds(std::span<const double> theta) const override;
    double a_plus(std::span<const double> theta) const override;
    double sam_rate(const ParameterDomain& domain) const override;

    // Selection part of the SDE drift, G^k = x^k (1-x^k) V^k(x).
    void coupling_term(std::span<const double> x, std::span<const double> theta,
                       std::span<double> out) const;

    // Scalar haploid parameter equivalent to locus k when the family is
    // separable: eta_k = c_k = theta_scalar / 2.
    double locus_scalar_theta(int k, std::span<const double> theta) const { return 2.0 * theta[k]; }

    // Per-locus pieces; only meaningful without interactions.
    double locus_phi(int k, double x, std::span<const double> theta) const override;
    PhiBounds locus_phi_bounds(int k, std::span<const double> theta) const override;
    double locus_sam_rate(int k, const ParameterDomain& domain) const override;

    // Index of d_{kl} (k < l) inside theta; only valid with free interactions.
    int d_index(int k, int l) const;

  private:
    int L_;
    MutationRates mu_;
    bool free_interactions_;
};

// Collapse raw per-type advantages s (L x 2, row-major) and the interaction
// tensor h (L x L x 2 x 2, row-major, diagonal ignored) to the reduced theta
// vector of a CoupledModel.  Rejects tensors violating the symmetry
// h^{kl}_{jr} = h^{lk}_{rj}, and rejects nonzero interactions when
// free_interactions is false.
std::vector<double> reduce_coupled_parameters(int loci, std::span<const double> s,
                                              std::span<const double> h, bool free_interactions);

}  // namespace wf
