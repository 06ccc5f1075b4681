#include "wfexact/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wfexact/threading.hpp"

namespace wf {

namespace {

// Optimizers compare against a floor instead of -inf so that parabolic steps
// stay finite when some contribution underflows.
double guarded(double v) { return std::isfinite(v) ? v : -1e300; }

}  // namespace

MleResult brent_maximize(const std::function<double(double)>& f, double a, double b, double xtol,
                         int max_eval) {
    if (!(a < b)) throw ConfigError("brent: need a < b");
    constexpr double kGold = 0.3819660112501051;  // 2 - golden ratio
    const double eps = std::sqrt(std::numeric_limits<double>::epsilon());

    int evals = 0;
    auto g = [&](double x) {
        ++evals;
        return guarded(f(x));
    };

    double x = a + kGold * (b - a);
    double w = x, v = x;
    double fx = g(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;
    bool converged = false;

    while (evals < max_eval) {
        const double m = 0.5 * (a + b);
        const double tol1 = eps * std::fabs(x) + xtol / 3.0;
        const double tol2 = 2.0 * tol1;
        if (std::fabs(x - m) <= tol2 - 0.5 * (b - a)) {
            converged = true;
            break;
        }
        double r = 0.0, q = 0.0, p = 0.0;
        bool golden = true;
        if (std::fabs(e) > tol1) {
            // parabola through (v,fv), (w,fw), (x,fx); maximization flips signs
            r = (x - w) * (fx - fv);
            q = (x - v) * (fx - fw);
            p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::fabs(q);
            double e_old = e;
            e = d;
            if (std::fabs(p) < std::fabs(0.5 * q * e_old) && p > q * (a - x) &&
                p < q * (b - x)) {
                d = p / q;
                double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (x < m) ? tol1 : -tol1;
                golden = false;
            }
        }
        if (golden) {
            e = (x < m) ? b - x : a - x;
            d = kGold * e;
        }
        double u = (std::fabs(d) >= tol1) ? x + d : x + (d > 0.0 ? tol1 : -tol1);
        double fu = g(u);
        if (fu >= fx) {
            if (u < x)
                b = x;
            else
                a = x;
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if (u < x)
                a = u;
            else
                b = u;
            if (fu >= fw || w == x) {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if (fu >= fv || v == x || v == w) {
                v = u;
                fv = fu;
            }
        }
    }
    MleResult res;
    res.theta_hat = {x};
    res.log_lik = fx;
    res.evaluations = evals;
    res.converged = converged;
    return res;
}

MleResult simplex_maximize(const std::function<double(std::span<const double>)>& f,
                           const ParameterDomain& box, std::span<const double> start,
                           double xtol, int max_eval) {
    const std::size_t n = box.dim();
    if (start.size() != n) throw ConfigError("simplex: start dimension mismatch");
    auto project = [&](std::vector<double>& p) {
        for (std::size_t i = 0; i < n; ++i) p[i] = std::clamp(p[i], box.lower[i], box.upper[i]);
    };
    int evals = 0;
    auto g = [&](const std::vector<double>& p) {
        ++evals;
        return guarded(f(p));
    };

    // initial simplex: start plus per-coordinate steps, projected
    std::vector<std::vector<double>> pts(n + 1, std::vector<double>(start.begin(), start.end()));
    for (std::size_t i = 0; i < n; ++i) {
        double step = 0.1 * (box.upper[i] - box.lower[i]);
        if (step <= 0.0) step = 0.0;
        pts[i + 1][i] += (pts[i + 1][i] + step <= box.upper[i]) ? step : -step;
        project(pts[i + 1]);
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = g(pts[i]);

    auto diameter = [&]() {
        double dmax = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                dmax = std::max(dmax, std::fabs(pts[i][j] - pts[0][j]));
        return dmax;
    };

    bool converged = false;
    while (evals < max_eval) {
        // order descending (best first; we maximize)
        std::vector<std::size_t> idx(n + 1);
        for (std::size_t i = 0; i <= n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return fv[a] > fv[b]; });
        std::vector<std::vector<double>> p2(n + 1);
        std::vector<double> f2(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            p2[i] = pts[idx[i]];
            f2[i] = fv[idx[i]];
        }
        pts.swap(p2);
        fv.swap(f2);
        if (diameter() < xtol) {
            converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j] / n;

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + coef * (pts[n][j] - centroid[j]);
            project(p);
            return p;
        };

        std::vector<double> xr = blend(-1.0);  // reflection
        double fr = g(xr);
        if (fr > fv[0]) {
            std::vector<double> xe = blend(-2.0);  // expansion
            double fe = g(xe);
            if (fe > fr) {
                pts[n] = xe;
                fv[n] = fe;
            } else {
                pts[n] = xr;
                fv[n] = fr;
            }
        } else if (fr > fv[n - 1]) {
            pts[n] = xr;
            fv[n] = fr;
        } else {
            bool outside = fr > fv[n];
            std::vector<double> xc = blend(outside ? -0.5 : 0.5);
            double fc = g(xc);
            if (fc > (outside ? fr : fv[n])) {
                pts[n] = xc;
                fv[n] = fc;
            } else {
                // shrink toward the best vertex
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        pts[i][j] = pts[0][j] + 0.5 * (pts[i][j] - pts[0][j]);
                    project(pts[i]);
                    fv[i] = g(pts[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fv[i] > fv[best]) best = i;
    MleResult res;
    res.theta_hat = pts[best];
    res.log_lik = fv[best];
    res.evaluations = evals;
    res.converged = converged;
    return res;
}

MleResult maximize_likelihood(const SamLikelihood& lik, const OptimOptions& opts,
                              std::uint64_t seed) {
    const ParameterDomain& box = lik.domain();
    MleResult res;
    if (box.dim() == 1) {
        res = brent_maximize([&](double v) { return lik.log_lik({&v, 1}); }, box.lower[0],
                             box.upper[0], opts.xtol, opts.max_eval);
    } else {
        auto f = [&](std::span<const double> th) { return lik.log_lik(th); };
        std::vector<std::vector<double>> starts;
        starts.push_back(box.center());
        RngStream rng = RngStream::derive(seed, {stream::kOptimizer});
        for (int s = 1; s < opts.multistart; ++s) {
            std::vector<double> p(box.dim());
            for (std::size_t i = 0; i < box.dim(); ++i)
                p[i] = box.lower[i] + rng.uniform() * (box.upper[i] - box.lower[i]);
            starts.push_back(std::move(p));
        }
        bool first = true;
        int total_evals = 0;
        for (const auto& s0 : starts) {
            MleResult r = simplex_maximize(f, box, s0, opts.xtol, opts.max_eval);
            total_evals += r.evaluations;
            if (first || r.log_lik > res.log_lik) res = r;
            first = false;
        }
        res.evaluations = total_evals;
    }
    // report the re-evaluated value at the maximizer
    res.log_lik = lik.log_lik(res.theta_hat);
    return res;
}

MleResult estimate_mle(const SelectionModel& model, const ParameterDomain& domain,
                       const ObservationSeries& series, const EstimateOptions& opts) {
    auto draws = std::make_shared<std::vector<ContributionDraws>>(
        draw_all_contributions(model, domain, series, opts.n_samples, opts.seed, opts.neutral,
                               opts.threads));
    SamLikelihood lik(model, domain, draws);
    MleResult res = maximize_likelihood(lik, opts.optim, opts.seed);
    if (opts.bootstrap_B > 0) {
        res.bootstrap_se = bootstrap_se(lik, opts.bootstrap_B, opts.optim, opts.seed,
                                        opts.threads, opts.bootstrap_resample_observations);
    }
    return res;
}

std::vector<double> bootstrap_se(const SamLikelihood& lik, int replicates,
                                 const OptimOptions& optim, std::uint64_t seed, int threads,
                                 bool resample_observations,
                                 std::vector<std::vector<double>>* replicate_thetas) {
    if (replicates < 2) throw ConfigError("bootstrap: need at least 2 replicates");
    const std::size_t n = lik.draws().size();
    const std::size_t dim = lik.domain().dim();
    std::vector<std::vector<double>> thetas(replicates);

    auto draws_ptr = std::make_shared<const std::vector<ContributionDraws>>(lik.draws());
    parallel_for(replicates, threads, [&](std::size_t r) {
        SamLikelihood replicate(lik.model(), lik.domain(), draws_ptr);
        if (resample_observations) {
            RngStream rng = RngStream::derive(seed, {stream::kBootstrap, r});
            std::vector<int> counts(n, 0);
            for (std::size_t i = 0; i < n; ++i)
                counts[static_cast<std::size_t>(rng.uniform_co() * n)]++;
            replicate.set_observation_weights(std::move(counts));
        } else {
            std::vector<std::vector<int>> resample(n);
            for (std::size_t i = 0; i < n; ++i) {
                const int N = lik.draws()[i].n_samples;
                RngStream rng = RngStream::derive(seed, {stream::kBootstrap, r, i});
                resample[i].resize(N);
                for (int j = 0; j < N; ++j)
                    resample[i][j] = static_cast<int>(rng.uniform_co() * N);
            }
            replicate.set_resample(std::move(resample));
        }
        MleResult r_res = maximize_likelihood(replicate, optim, seed + 1 + r);
        thetas[r] = r_res.theta_hat;
    });

    if (replicate_thetas) *replicate_thetas = thetas;
    std::vector<double> se(dim, 0.0);
    for (std::size_t c = 0; c < dim; ++c) {
        double mean = 0.0;
        for (const auto& th : thetas) mean += th[c];
        mean /= replicates;
        double ss = 0.0;
        for (const auto& th : thetas) ss += (th[c] - mean) * (th[c] - mean);
        se[c] = std::sqrt(ss / (replicates - 1));
    }
    return se;
}

}  // namespace wf
