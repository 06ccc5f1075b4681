#include "wfexact/special.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <stdexcept>

namespace wf {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// 16-point Gauss-Legendre nodes/weights on [-1,1] (positive half; symmetric).
constexpr double kGLNodes[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double kGLWeights[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};
}  // namespace

double log_choose(int n, int k) {
    if (k < 0 || k > n) return kNegInf;
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double log_binomial_pmf(int k, int n, double p) {
    if (k < 0 || k > n) return kNegInf;
    if (p <= 0.0) return k == 0 ? 0.0 : kNegInf;
    if (p >= 1.0) return k == n ? 0.0 : kNegInf;
    double lp = log_choose(n, k);
    if (k > 0) lp += k * std::log(p);
    if (k < n) lp += (n - k) * std::log1p(-p);
    return lp;
}

double log_beta_fn(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double log_beta_pdf(double y, double a, double b) {
    if (!(y > 0.0 && y < 1.0)) throw std::invalid_argument("log_beta_pdf: y must be interior");
    return (a - 1.0) * std::log(y) + (b - 1.0) * std::log1p(-y) - log_beta_fn(a, b);
}

double log_sum_exp(std::span<const double> v) {
    double mx = kNegInf;
    for (double x : v) mx = std::max(mx, x);
    if (mx == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

double log_mean_exp(std::span<const double> v) {
    if (v.empty()) return kNegInf;
    return log_sum_exp(v) - std::log(static_cast<double>(v.size()));
}

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) {
        // series representation
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    return 1.0 - gamma_q(a, x);
}

double gamma_q(double a, double x) {
    if (x < a + 1.0) return 1.0 - gamma_p(a, x);
    // Lentz continued fraction for Q(a,x).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double chi_square_sf(double x, double df) {
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

namespace {
double beta_cf(double a, double b, double x) {
    const double tiny = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    return h;
}
}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta_fn(a, b));
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double integrate_gl(const std::function<double(double)>& f, double a, double b, int panels) {
    double total = 0.0;
    double w = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        double lo = a + p * w;
        double mid = lo + 0.5 * w;
        double half = 0.5 * w;
        double s = 0.0;
        for (int i = 0; i < 8; ++i) {
            s += kGLWeights[i] * (f(mid + half * kGLNodes[i]) + f(mid - half * kGLNodes[i]));
        }
        total += s * half;
    }
    return total;
}

double integrate_unit_density(const std::function<double(double, double)>& f, double cut) {
    // On each half, substitute u = log(distance to the boundary):
    //   int_0^{1/2} g(y) dy = int_{log cut}^{log 1/2} g(e^u) e^u du,
    // which turns a y^{c-1} singularity into a smooth exp(c u) integrand.
    auto half_integral = [&](bool lower) {
        const double u_lo = std::log(cut);
        const double u_hi = std::log(0.5);
        const int panels = std::max(24, static_cast<int>((u_hi - u_lo) / 2.0));
        auto g = [&](double u) {
            double d = std::exp(u);  // distance to the boundary
            double y = lower ? d : 1.0 - d;
            double omy = lower ? 1.0 - d : d;
            return f(y, omy) * d;
        };
        return integrate_gl(g, u_lo, u_hi, panels);
    };
    return half_integral(true) + half_integral(false);
}

double ks_statistic(std::span<const double> sorted_cdf_values) {
    const double n = static_cast<double>(sorted_cdf_values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted_cdf_values.size(); ++i) {
        double F = sorted_cdf_values[i];
        d = std::max(d, std::fabs(F - (i + 1) / n));
        d = std::max(d, std::fabs(F - i / n));
    }
    return d;
}

}  // namespace wf
