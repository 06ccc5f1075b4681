#include "wfexact/neutral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "wfexact/special.hpp"

namespace wf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// lgamma(base + i) for i = 0..n-1, computed once per table assembly.
struct LgammaShift {
    double base;
    std::vector<double> v;
    LgammaShift(double b, int n) : base(b), v(n) {
        for (int i = 0; i < n; ++i) v[i] = std::lgamma(b + i);
    }
    double operator()(int i) const { return v[i]; }
};

// max over l of log Beta(y; theta_a + l, theta_A + m - l)
double log_max_beta_pdf(int m, double log_y, double log_omy, const MutationRates& mu) {
    double best = kNegInf;
    for (int l = 0; l <= m; ++l) {
        double a = mu.theta_a + l;
        double b = mu.theta_A + (m - l);
        double lp = (a - 1.0) * log_y + (b - 1.0) * log_omy - log_beta_fn(a, b);
        best = std::max(best, lp);
    }
    return best;
}

// Extends sum_{m > m_from} q_up(m) * maxBeta(m, y) until the terms provably
// vanish; returns a log-scale upper bound of the remainder sum.  Requires the
// exact (non-fallback) regime.
double log_q_density_tail(AncestralSeries& series, int m_from, double log_y, double log_omy,
                          const MutationRates& mu) {
    double log_total = kNegInf;
    double prev = kNegInf;
    int decays = 0;
    for (int m = m_from + 1; m <= series.options().m_budget; ++m) {
        double q_up = series.bracket(m, 0).hi;
        double term = (q_up > 0.0 ? std::log(q_up) + log_max_beta_pdf(m, log_y, log_omy, mu)
                                  : kNegInf);
        double pair[2] = {log_total, term};
        log_total = log_sum_exp(pair);
        // vanished or halving terms for three steps: bound the remainder by
        // one extra term's worth
        if (term == kNegInf || term < prev - 0.6931) {
            if (++decays >= 3) {
                double rem[2] = {log_total, term};
                return log_sum_exp(rem);
            }
        } else {
            decays = 0;
        }
        prev = term;
    }
    throw TruncationBudget("density tail: no geometric decay within m budget");
}

}  // namespace

double log_density_given_m(int m, double x, double y, double one_minus_y,
                           const MutationRates& mu) {
    // y == 1.0 is admissible when the complement still carries the value
    // (log(y) = -one_minus_y to double accuracy there)
    if (!(y > 0.0) || !(one_minus_y > 0.0))
        throw DataError("density: y must be strictly inside (0,1)");
    const double log_y = y < 1.0 ? std::log(y) : -one_minus_y;
    const double log_omy = std::log(one_minus_y);
    std::vector<double> terms;
    terms.reserve(m + 1);
    for (int l = 0; l <= m; ++l) {
        double lb = log_binomial_pmf(l, m, x);
        if (lb == kNegInf) continue;
        double a = mu.theta_a + l;
        double b = mu.theta_A + (m - l);
        terms.push_back(lb + (a - 1.0) * log_y + (b - 1.0) * log_omy - log_beta_fn(a, b));
    }
    return log_sum_exp(terms);
}

double density_given_m(int m, double x, double y, const MutationRates& mu) {
    return std::exp(log_density_given_m(m, x, y, 1.0 - y, mu));
}

double log_transition_density_estimate(double x, double y, std::span<const int> m_draws,
                                       const MutationRates& mu) {
    std::vector<double> logs;
    logs.reserve(m_draws.size());
    for (int m : m_draws) logs.push_back(log_density_given_m(m, x, y, 1.0 - y, mu));
    return log_mean_exp(logs);
}

double transition_density_estimate(double x, double y, std::span<const int> m_draws,
                                   const MutationRates& mu) {
    return std::exp(log_transition_density_estimate(x, y, m_draws, mu));
}

double transition_density_oracle(double x, double y, double t, const MutationRates& mu,
                                 double tol, const AncestralOptions& opts, double one_minus_y) {
    AncestralOptions o = opts;
    o.approx_small_t = false;
    AncestralSeries series(t, mu.theta(), o);
    if (one_minus_y < 0.0) one_minus_y = 1.0 - y;
    const double log_y = y < 1.0 ? std::log(y) : -one_minus_y;
    const double log_omy = std::log(one_minus_y);
    double sum = 0.0;
    double cum_lo = 0.0;
    for (int m = 0; m <= o.m_budget; ++m) {
        double q = series.pmf(m, std::min(1e-13, tol * 1e-3));
        sum += q * std::exp(log_density_given_m(m, x, y, one_minus_y, mu));
        cum_lo += series.bracket(m, 0).lo;
        if (1.0 - cum_lo < 1e-14 ||
            (m > 2 && std::exp(log_q_density_tail(series, m, log_y, log_omy, mu)) < tol))
            return sum;
    }
    throw TruncationBudget("transition density oracle: tail not certified within m budget");
}

TransitionDraw sample_transition(double x, AncestralSeries& series, const MutationRates& mu,
                                 RngStream& rng) {
    int m = series.sample(rng);
    int l = rng.binomial(m, x);
    auto bd = rng.beta(mu.theta_a + l, mu.theta_A + (m - l));
    return {m, l, bd.y, bd.one_minus_y};
}

namespace {

// Assembled mixture over (m1, l1, m2, l2) for one conditional bridge step.
struct BridgeTable {
    std::vector<double> q1, q2;          // weight vectors (midpoints)
    int M1 = 0, M2 = 0;                  // table sizes
    std::vector<double> log_cell;        // log(q1 q2 G) per (m1, m2), row-major
    double log_total = kNegInf;          // log W (symmetric-form scale)
    // per-m binomial windows
    std::vector<int> l1_lo, l1_hi;
    std::vector<int> l2_lo, l2_hi;
};

struct StepParams {
    double u, y, s, r;
    double log_u, log_omu;  // start state and its complement, in logs
    double log_y, log_omy;  // terminal state likewise
    const MutationRates* mu;
};

// log of v (given the pair v, 1-v) without losing the last ulps near 1
double log_from_pair(double v, double omv) { return v < 1.0 ? std::log(v) : -omv; }

// Certified Hoeffding window for Binomial(m, p): all but eps of the mass.
std::pair<int, int> binomial_window(int m, double p, double one_minus_p, double eps) {
    if (m <= 64) return {0, m};
    double w = std::sqrt(0.5 * m * std::log(2.0 / eps));
    double mean = p < 1.0 ? m * p : m * (1.0 - one_minus_p);
    int lo = std::max(0, static_cast<int>(std::floor(mean - w)));
    int hi = std::min(m, static_cast<int>(std::ceil(mean + w)));
    return {lo, hi};
}

constexpr double kBinomialEps = 1e-16;

// distinguishes "table too large" (eligible for the local fallback) from a
// failed truncation certificate (never silently approximated)
struct TableBudgetExceeded : TruncationBudget {
    using TruncationBudget::TruncationBudget;
};

// Component weights in the endpoint-symmetric form
//   Binom(l1; m1, u) Binom(l2; m2, y)
//       B(ta + l1 + l2, tA + j1 + j2) / [B(ta + l1, tA + j1) B(ta + l2, tA + j2)],
// which is the stated mixture up to the constant factor y^{ta-1}(1-y)^{tA-1}
// (expand the second transition density from its outer endpoint through
// reversibility).  Both l sums are plain binomials, so both admit certified
// Hoeffding windows; the conditional of z stays Beta(ta+l1+l2, tA+j1+j2).
double log_cell_value(const StepParams& sp, int m1, int m2, int l1_lo, int l1_hi, int l2_lo,
                      int l2_hi, const LgammaShift& lg_a, const LgammaShift& lg_b,
                      const LgammaShift& lg_ab, const LgammaShift& lg_int) {
    auto lchoose = [&](int n, int k) { return lg_int(n) - lg_int(k) - lg_int(n - k); };
    std::vector<double> terms;
    terms.reserve((l1_hi - l1_lo + 1) * (l2_hi - l2_lo + 1));
    for (int l1 = l1_lo; l1 <= l1_hi; ++l1) {
        const int j1 = m1 - l1;
        // 0 * (-inf) must read as zero here
        double lbin1 = lchoose(m1, l1) + (l1 > 0 ? l1 * sp.log_u : 0.0) +
                       (j1 > 0 ? j1 * sp.log_omu : 0.0);
        const double neg_log_b1 = lg_ab(m1) - lg_a(l1) - lg_b(j1);
        for (int l2 = l2_lo; l2 <= l2_hi; ++l2) {
            const int j2 = m2 - l2;
            double lbin2 = lchoose(m2, l2) + (l2 > 0 ? l2 * sp.log_y : 0.0) +
                           (j2 > 0 ? j2 * sp.log_omy : 0.0);
            const double neg_log_b2 = lg_ab(m2) - lg_a(l2) - lg_b(j2);
            double log_b12 = lg_a(l1 + l2) + lg_b(j1 + j2) - lg_ab(m1 + m2);
            terms.push_back(lbin1 + neg_log_b1 + lbin2 + neg_log_b2 + log_b12);
        }
    }
    return log_sum_exp(terms);
}

BridgeTable assemble_bridge_table(const StepParams& sp, AncestralSeries& s1,
                                  AncestralSeries& s2, const NeutralOptions& opts) {
    const double eps = opts.bridge_eps;
    QWeights w1 = s1.weights(1e-13, 1e-13);
    QWeights w2 = s2.weights(1e-13, 1e-13);

    BridgeTable bt;
    bt.q1 = w1.w;
    bt.q2 = w2.w;
    bt.M1 = static_cast<int>(w1.w.size());
    bt.M2 = static_cast<int>(w2.w.size());

    const double omu = std::exp(sp.log_omu);
    const double omy = std::exp(sp.log_omy);
    bt.l1_lo.resize(bt.M1);
    bt.l1_hi.resize(bt.M1);
    bt.l2_lo.resize(bt.M2);
    bt.l2_hi.resize(bt.M2);
    std::size_t w1_sum = 0, w2_sum = 0;
    for (int m1 = 0; m1 < bt.M1; ++m1) {
        auto [lo, hi] = binomial_window(m1, sp.u, omu, kBinomialEps);
        bt.l1_lo[m1] = lo;
        bt.l1_hi[m1] = hi;
        w1_sum += hi - lo + 1;
    }
    for (int m2 = 0; m2 < bt.M2; ++m2) {
        // the terminal window is only cut in the fallback regime, where the
        // large block counts live and no exact certificate is computed
        auto [lo, hi] = w2.approximate ? binomial_window(m2, sp.y, omy, kBinomialEps)
                                       : std::pair<int, int>{0, m2};
        bt.l2_lo[m2] = lo;
        bt.l2_hi[m2] = hi;
        w2_sum += hi - lo + 1;
    }
    if (w1_sum * w2_sum > opts.table_budget)
        throw TableBudgetExceeded("bridge step: mixture table exceeds component budget (gaps " +
                                  std::to_string(sp.s) + ", " + std::to_string(sp.r) + ")");

    const int nmax = bt.M1 + bt.M2 + 2;
    LgammaShift lg_a(sp.mu->theta_a, nmax);
    LgammaShift lg_b(sp.mu->theta_A, nmax);
    LgammaShift lg_ab(sp.mu->theta(), 2 * nmax);
    LgammaShift lg_int(1.0, 2 * nmax);

    bt.log_cell.assign(static_cast<std::size_t>(bt.M1) * bt.M2, kNegInf);
    std::vector<double> all;
    all.reserve(bt.log_cell.size());
    for (int m1 = 0; m1 < bt.M1; ++m1) {
        const double lq1 = bt.q1[m1] > 0.0 ? std::log(bt.q1[m1]) : kNegInf;
        for (int m2 = 0; m2 < bt.M2; ++m2) {
            const double lq2 = bt.q2[m2] > 0.0 ? std::log(bt.q2[m2]) : kNegInf;
            double lc = kNegInf;
            if (lq1 != kNegInf && lq2 != kNegInf)
                lc = lq1 + lq2 +
                     log_cell_value(sp, m1, m2, bt.l1_lo[m1], bt.l1_hi[m1], bt.l2_lo[m2],
                                    bt.l2_hi[m2], lg_a, lg_b, lg_ab, lg_int);
            bt.log_cell[m1 * bt.M2 + m2] = lc;
            all.push_back(lc);
        }
    }
    bt.log_total = log_sum_exp(all);
    if (!std::isfinite(bt.log_total))
        throw TruncationBudget("bridge step: degenerate mixture (zero total mass)");

    // Truncation certificate (skipped entirely in the labeled fallback
    // regime, whose weight tables carry their own documented bias).  The
    // density-cap bounds live on the stated-mixture scale, which differs
    // from the symmetric table scale by the constant y-density factor.
    if (!w1.approximate && !w2.approximate) {
        const double log_total_spec = bt.log_total + (sp.mu->theta_a - 1.0) * sp.log_y +
                                      (sp.mu->theta_A - 1.0) * sp.log_omy;
        // A = sum_{m2 <= M2} q2up maxBeta(m2), tail T2 beyond M2
        double log_A = kNegInf;
        for (int m2 = 0; m2 < bt.M2; ++m2) {
            double q_up = s2.bracket(m2, 0).hi;
            if (q_up <= 0.0) continue;
            double term = std::log(q_up) + log_max_beta_pdf(m2, sp.log_y, sp.log_omy, *sp.mu);
            double pair[2] = {log_A, term};
            log_A = log_sum_exp(pair);
        }
        double log_T2 = log_q_density_tail(s2, bt.M2 - 1, sp.log_y, sp.log_omy, *sp.mu);
        double pairA[2] = {log_A, log_T2};
        double log_A_all = log_sum_exp(pairA);  // sum over all m2 of q2 maxBeta
        // T1: q1 tail times the full m2 sum; Tbin: dropped binomial mass
        double log_T1 = (w1.tail_bound > 0.0 ? std::log(w1.tail_bound) : kNegInf) + log_A_all;
        double log_Tbin = std::log(kBinomialEps) + log_A_all;
        // Tq: weight uncertainty, the achieved bracket half-widths weighted by
        // each row/column's share of the assembled mass.  Rows skipped for a
        // zero weight midpoint are bounded through the uniform density cap.
        double Tq = 0.0;
        for (int m1 = 0; m1 < bt.M1; ++m1) {
            double hw = w1.half_width[m1];
            if (bt.q1[m1] > 0.0) {
                std::vector<double> row(bt.log_cell.begin() + m1 * bt.M2,
                                        bt.log_cell.begin() + (m1 + 1) * bt.M2);
                Tq += std::exp(log_sum_exp(row) - bt.log_total) * (2.0 * hw / bt.q1[m1]);
            } else if (hw > 0.0) {
                Tq += std::exp(std::log(2.0 * hw) + log_A_all - log_total_spec);
            }
        }
        for (int m2 = 0; m2 < bt.M2; ++m2) {
            double hw = w2.half_width[m2];
            if (bt.q2[m2] > 0.0) {
                std::vector<double> col;
                col.reserve(bt.M1);
                for (int m1 = 0; m1 < bt.M1; ++m1) col.push_back(bt.log_cell[m1 * bt.M2 + m2]);
                Tq += std::exp(log_sum_exp(col) - bt.log_total) * (2.0 * hw / bt.q2[m2]);
            } else if (hw > 0.0) {
                Tq += std::exp(std::log(2.0 * hw) + log_A_all - log_total_spec);
            }
        }
        double rel_tail = std::exp(log_sum_exp(std::array{log_T2, log_T1, log_Tbin}) -
                                   log_total_spec) +
                          Tq;
        if (!(rel_tail <= eps)) {
            char msg[256];
            std::snprintf(msg, sizeof(msg),
                          "bridge step: certified truncation bound %.3e exceeds eps %.1e "
                          "(T2=%.2e T1=%.2e Tbin=%.2e Tq=%.2e logW=%.3f s=%.4g r=%.4g)",
                          rel_tail, eps, std::exp(log_T2 - log_total_spec),
                          std::exp(log_T1 - log_total_spec), std::exp(log_Tbin - log_total_spec),
                          Tq, log_total_spec, sp.s, sp.r);
            throw TruncationBudget(msg);
        }
    }
    return bt;
}

}  // namespace

struct BridgeStepSampler::Impl {
    StepParams sp;
    MutationRates mu;
    BridgeTable bt;
    std::vector<double> cell_cdf;  // normalized cumulative cell weights
    // moment-matched local regime (gaps below bridge_local_floor)
    bool local = false;
    double local_a = 0.0, local_b = 0.0;

    Impl(const StepParams& sp_in, const MutationRates& mu_in, BridgeTable bt_in)
        : sp(sp_in), mu(mu_in), bt(std::move(bt_in)) {
        sp.mu = &mu;
        cell_cdf.resize(bt.log_cell.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < bt.log_cell.size(); ++i) {
            acc += std::exp(bt.log_cell[i] - bt.log_total);
            cell_cdf[i] = acc;
        }
    }
    Impl(const StepParams& sp_in, const MutationRates& mu_in, double a, double b)
        : sp(sp_in), mu(mu_in), local(true), local_a(a), local_b(b) {
        sp.mu = &mu;
    }
};

namespace {

// Brownian-bridge moments with the local diffusion coefficient, matched to a
// beta on (0,1).  Valid labeled approximation for gaps far below the series
// regime, where block counts ~2/gap defeat any exact table.
std::pair<double, double> local_beta_shapes(double u, double y, double s, double r) {
    const double w = s / (s + r);
    double mean = u + w * (y - u);
    mean = std::min(std::max(mean, 1e-300), 1.0 - 1e-16);
    double var = mean * (1.0 - mean) * s * r / (s + r);
    const double cap = 0.25 * mean * (1.0 - mean);
    if (var > cap) var = cap;
    double nu = mean * (1.0 - mean) / var - 1.0;
    return {mean * nu, (1.0 - mean) * nu};
}

}  // namespace

BridgeStepSampler::BridgeStepSampler(double u, double y, double s, double r,
                                     const MutationRates& mu, const NeutralOptions& opts,
                                     double one_minus_u, double one_minus_y) {
    if (one_minus_u < 0.0) one_minus_u = 1.0 - u;
    if (one_minus_y < 0.0) one_minus_y = 1.0 - y;
    if (!(u > 0.0) || !(one_minus_u > 0.0) || !(y > 0.0) || !(one_minus_y > 0.0))
        throw DataError("bridge step: endpoints must be strictly inside (0,1)");
    StepParams sp{u,
                  y,
                  s,
                  r,
                  log_from_pair(u, one_minus_u),
                  std::log(one_minus_u),
                  log_from_pair(y, one_minus_y),
                  std::log(one_minus_y),
                  &mu};
    const double gap = std::min(s, r);
    if (gap < opts.bridge_local_floor) {
        if (!opts.ancestral.approx_small_t) throw TimeTooSmall(gap, opts.ancestral.t_min);
        auto [a, b] = local_beta_shapes(u, y, s, r);
        impl_ = std::make_unique<Impl>(sp, mu, a, b);
        return;
    }
    AncestralSeries s1(s, mu.theta(), opts.ancestral);
    AncestralSeries s2(r, mu.theta(), opts.ancestral);
    try {
        impl_ = std::make_unique<Impl>(sp, mu, assemble_bridge_table(sp, s1, s2, opts));
    } catch (const TableBudgetExceeded&) {
        // table infeasible (both gaps small): fall back to the local step if
        // the approximate regime is allowed
        if (!opts.ancestral.approx_small_t) throw;
        auto [a, b] = local_beta_shapes(u, y, s, r);
        impl_ = std::make_unique<Impl>(sp, mu, a, b);
    }
}

BridgeStepSampler::~BridgeStepSampler() = default;
BridgeStepSampler::BridgeStepSampler(BridgeStepSampler&&) noexcept = default;
BridgeStepSampler& BridgeStepSampler::operator=(BridgeStepSampler&&) noexcept = default;

RngStream::BetaDraw BridgeStepSampler::sample_pair(RngStream& rng) const {
    const Impl& im = *impl_;
    if (im.local) return rng.beta(im.local_a, im.local_b);
    const BridgeTable& bt = im.bt;
    const MutationRates& mu = im.mu;

    // cell draw by inverse CDF, then (l1, l2) inside the cell, then the beta
    double u01 = rng.uniform();
    std::size_t cell =
        std::lower_bound(im.cell_cdf.begin(), im.cell_cdf.end(), u01) - im.cell_cdf.begin();
    if (cell >= bt.log_cell.size()) cell = bt.log_cell.size() - 1;
    const int m1 = static_cast<int>(cell) / bt.M2;
    const int m2 = static_cast<int>(cell) % bt.M2;

    const int nmax = bt.M1 + bt.M2 + 2;
    LgammaShift lg_a(mu.theta_a, nmax);
    LgammaShift lg_b(mu.theta_A, nmax);
    LgammaShift lg_ab(mu.theta(), 2 * nmax);
    LgammaShift lg_int(1.0, 2 * nmax);
    auto lchoose = [&](int n, int k) { return lg_int(n) - lg_int(k) - lg_int(n - k); };

    const int lo1 = bt.l1_lo[m1], hi1 = bt.l1_hi[m1];
    const int lo2 = bt.l2_lo[m2], hi2 = bt.l2_hi[m2];
    const int width2 = hi2 - lo2 + 1;
    std::vector<double> inner;
    inner.reserve((hi1 - lo1 + 1) * width2);
    for (int l1 = lo1; l1 <= hi1; ++l1) {
        const int j1 = m1 - l1;
        double lbin1 = lchoose(m1, l1) + (l1 > 0 ? l1 * im.sp.log_u : 0.0) +
                       (j1 > 0 ? j1 * im.sp.log_omu : 0.0);
        double neg_log_b1 = lg_ab(m1) - lg_a(l1) - lg_b(j1);
        for (int l2 = lo2; l2 <= hi2; ++l2) {
            const int j2 = m2 - l2;
            double lbin2 = lchoose(m2, l2) + (l2 > 0 ? l2 * im.sp.log_y : 0.0) +
                           (j2 > 0 ? j2 * im.sp.log_omy : 0.0);
            double neg_log_b2 = lg_ab(m2) - lg_a(l2) - lg_b(j2);
            double log_b12 = lg_a(l1 + l2) + lg_b(j1 + j2) - lg_ab(m1 + m2);
            inner.push_back(lbin1 + neg_log_b1 + lbin2 + neg_log_b2 + log_b12);
        }
    }
    double inner_total = log_sum_exp(inner);
    double t2 = std::log(rng.uniform()) + inner_total;
    std::size_t pick = inner.size() - 1;
    double acc = kNegInf;
    for (std::size_t i = 0; i < inner.size(); ++i) {
        double pair[2] = {acc, inner[i]};
        acc = log_sum_exp(pair);
        if (acc > t2) {
            pick = i;
            break;
        }
    }
    const int l1 = lo1 + static_cast<int>(pick) / width2;
    const int l2 = lo2 + static_cast<int>(pick) % width2;
    return rng.beta(mu.theta_a + l1 + l2, mu.theta_A + (m1 - l1) + (m2 - l2));
}

double BridgeStepSampler::sample(RngStream& rng) const { return sample_pair(rng).y; }

double sample_bridge_point(double u, double y, double s, double r, const MutationRates& mu,
                           RngStream& rng, const NeutralOptions& opts) {
    BridgeStepSampler sampler(u, y, s, r, mu, opts);
    return sampler.sample(rng);
}

BridgeSkeleton sample_bridge_skeleton(double x, double y, double t,
                                      std::span<const double> times, const MutationRates& mu,
                                      RngStream& rng, const NeutralOptions& opts,
                                      double one_minus_x, double one_minus_y) {
    if (one_minus_x < 0.0) one_minus_x = 1.0 - x;
    if (one_minus_y < 0.0) one_minus_y = 1.0 - y;
    if (!(x > 0.0) || !(one_minus_x > 0.0) || !(y > 0.0) || !(one_minus_y > 0.0))
        throw DataError("bridge: endpoints must be strictly inside (0,1)");
    BridgeSkeleton sk;
    sk.x = x;
    sk.y = y;
    sk.t = t;
    sk.times.assign(times.begin(), times.end());
    for (std::size_t i = 0; i < sk.times.size(); ++i) {
        double prev = i == 0 ? 0.0 : sk.times[i - 1];
        if (!(sk.times[i] > prev) || !(sk.times[i] < t))
            throw DataError("bridge: times must be strictly increasing inside (0,t)");
    }
    sk.values.reserve(sk.times.size());
    double u = x, omu = one_minus_x;
    double tau = 0.0;
    for (double ti : sk.times) {
        BridgeStepSampler step(u, y, ti - tau, t - ti, mu, opts, omu, one_minus_y);
        RngStream::BetaDraw z = step.sample_pair(rng);
        sk.values.push_back(z.y);
        u = z.y;
        omu = z.one_minus_y;
        tau = ti;
    }
    return sk;
}

std::vector<BridgeSkeleton> sample_joint_bridge(std::span<const double> x,
                                                std::span<const double> y, double t,
                                                std::span<const double> times,
                                                const MutationRates& mu, RngStream& rng,
                                                const NeutralOptions& opts,
                                                std::span<const double> one_minus_x,
                                                std::span<const double> one_minus_y) {
    if (x.size() != y.size()) throw DataError("joint bridge: endpoint dimension mismatch");
    std::vector<BridgeSkeleton> out;
    out.reserve(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        double omx = one_minus_x.empty() ? -1.0 : one_minus_x[k];
        double omy = one_minus_y.empty() ? -1.0 : one_minus_y[k];
        out.push_back(sample_bridge_skeleton(x[k], y[k], t, times, mu, rng, opts, omx, omy));
    }
    return out;
}

}  // namespace wf
