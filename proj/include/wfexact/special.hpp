#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace wf {

// log C(n,k)
double log_choose(int n, int k);

// log pmf of Binomial(n,p) at k; exact  -inf conventions at p in {0,1}.
double log_binomial_pmf(int k, int n, double p);

// log pdf of Beta(a,b) at y, y strictly inside (0,1).
double log_beta_pdf(double y, double a, double b);

// log B(a,b)
double log_beta_fn(double a, double b);

// log(sum exp(v)) over a span, -inf safe.
double log_sum_exp(std::span<const double> v);

// log(mean exp(v))
double log_mean_exp(std::span<const double> v);

// Regularized lower incomplete gamma P(a,x) and upper Q(a,x) = 1 - P(a,x).
// Series for x < a+1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi_square_sf(double x, double df);

// Regularized incomplete beta I_x(a,b) (continued fraction).
double incomplete_beta(double a, double b, double x);

// Composite Gauss-Legendre integration of f over [a,b] with n panels.
double integrate_gl(const std::function<double(double)>& f, double a, double b, int panels);

// Integral over (0,1) of a density-like integrand with (possibly) integrable
// power singularities at both endpoints: panels are laid out geometrically in
// log(y) near 0 and log(1-y) near 1 down to `cut`.  The integrand is called
// as f(y, one_minus_y) so that both boundary distances stay accurate.
double integrate_unit_density(const std::function<double(double, double)>& f, double cut = 1e-290);

// Kolmogorov-Smirnov sup-distance between a sorted sample and a CDF given as
// values at the sample points (same order).
double ks_statistic(std::span<const double> sorted_cdf_values);

}  // namespace wf
