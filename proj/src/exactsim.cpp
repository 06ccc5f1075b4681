#include "wfexact/exactsim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

namespace wf {

MarkedPoissonSample sample_marked_poisson(double rate, double horizon, bool with_marks,
                                          RngStream& rng) {
    if (rate < 0.0 || !(horizon > 0.0))
        throw Error("marked poisson: need rate >= 0 and horizon > 0");
    MarkedPoissonSample s;
    s.rate = rate;
    s.horizon = horizon;
    s.times = rng.poisson_times(rate, horizon);
    if (with_marks) {
        s.marks.resize(s.times.size());
        for (double& m : s.marks) m = rng.uniform();
    }
    return s;
}

bool acceptance_indicator(const SelectionModel& model, std::span<const double> theta,
                          std::span<const double> states, std::span<const double> marks,
                          const PhiBounds& bounds) {
    const int L = model.loci();
    if (states.size() != marks.size() * static_cast<std::size_t>(L))
        throw Error("acceptance indicator: state/mark length mismatch");
    const double span = bounds.hi - bounds.lo;
    if (span <= 0.0) return true;
    for (std::size_t i = 0; i < marks.size(); ++i) {
        double phi = model.phi(states.subspan(i * L, L), theta);
        if ((phi - bounds.lo) / span > marks[i]) return false;
    }
    return true;
}

namespace {

// One neutral bridge fill per locus at shared times; values row-major.
std::vector<double> joint_bridge_values(std::span<const double> x, std::span<const double> y,
                                        double t, std::span<const double> times,
                                        const MutationRates& mu, RngStream& rng,
                                        const NeutralOptions& opts,
                                        std::span<const double> omx = {},
                                        std::span<const double> omy = {}) {
    const int L = static_cast<int>(x.size());
    std::vector<double> values(times.size() * L);
    for (int k = 0; k < L; ++k) {
        double ox = omx.empty() ? -1.0 : omx[k];
        double oy = omy.empty() ? -1.0 : omy[k];
        BridgeSkeleton sk = sample_bridge_skeleton(x[k], y[k], t, times, mu, rng, opts, ox, oy);
        for (std::size_t i = 0; i < times.size(); ++i) values[i * L + k] = sk.values[i];
    }
    return values;
}

}  // namespace

PathSkeleton sample_conditioned_path(const SelectionModel& model, std::span<const double> theta,
                                     std::span<const double> x, std::span<const double> y,
                                     double t, RngStream& rng, const SimOptions& opts) {
    const PhiBounds bounds = model.phi_bounds(theta);
    const double rate = bounds.hi - bounds.lo;
    PathSkeleton sk;
    sk.loci = model.loci();
    sk.t = t;
    sk.x.assign(x.begin(), x.end());
    sk.y.assign(y.begin(), y.end());
    for (long attempt = 1; attempt <= opts.rejection_budget; ++attempt) {
        MarkedPoissonSample pp = sample_marked_poisson(rate, t, true, rng);
        std::vector<double> values =
            joint_bridge_values(x, y, t, pp.times, model.mutation(), rng, opts.neutral);
        if (acceptance_indicator(model, theta, values, pp.marks, bounds)) {
            sk.times = std::move(pp.times);
            sk.values = std::move(values);
            sk.proposals = attempt;
            return sk;
        }
    }
    throw RejectionBudget("conditioned path: no acceptance within " +
                          std::to_string(opts.rejection_budget) +
                          " proposals (check phi bounds / parameter scale)");
}

ObservationSeries simulate_path(const SelectionModel& model, std::span<const double> theta,
                                std::span<const double> x0, std::span<const double> obs_times,
                                RngStream& rng, const SimOptions& opts, long* total_proposals) {
    const int L = model.loci();
    if (static_cast<int>(x0.size()) != L) throw Error("simulate: x0 dimension mismatch");
    const PhiBounds bounds = model.phi_bounds(theta);
    const double rate = bounds.hi - bounds.lo;
    const double a_plus = model.a_plus(theta);
    const MutationRates& mu = model.mutation();

    ObservationSeries out;
    out.loci = L;
    out.times.reserve(obs_times.size() + 1);
    out.times.push_back(0.0);
    out.values.assign(x0.begin(), x0.end());

    // Transition series are cached per distinct gap length.
    std::map<double, std::unique_ptr<AncestralSeries>> series_cache;
    auto series_for = [&](double dt) -> AncestralSeries& {
        auto it = series_cache.find(dt);
        if (it == series_cache.end()) {
            it = series_cache
                     .emplace(dt, std::make_unique<AncestralSeries>(dt, mu.theta(),
                                                                    opts.neutral.ancestral))
                     .first;
        }
        return *it->second;
    };

    long proposals = 0;
    std::vector<double> u(x0.begin(), x0.end());
    std::vector<double> omu(L);
    for (int k = 0; k < L; ++k) omu[k] = 1.0 - x0[k];
    std::vector<double> v(L), omv(L);
    double prev_time = 0.0;
    for (double ti : obs_times) {
        const double dt = ti - prev_time;
        if (!(dt > 0.0)) throw DataError("simulate: observation times must increase");
        AncestralSeries& series = series_for(dt);
        bool accepted = false;
        for (long attempt = 1; attempt <= opts.rejection_budget; ++attempt) {
            ++proposals;
            MarkedPoissonSample pp = sample_marked_poisson(rate, dt, true, rng);
            for (int k = 0; k < L; ++k) {
                TransitionDraw td = sample_transition(u[k], series, mu, rng);
                v[k] = td.y;
                omv[k] = td.one_minus_y;
            }
            std::vector<double> values =
                joint_bridge_values(u, v, dt, pp.times, mu, rng, opts.neutral, omu, omv);
            if (!acceptance_indicator(model, theta, values, pp.marks, bounds)) continue;
            // endpoint potential coin, exp{A(v) - A_plus} <= 1
            double log_p = model.girsanov_A(v, theta) - a_plus;
            if (std::log(rng.uniform()) < log_p) {
                accepted = true;
                break;
            }
        }
        if (!accepted)
            throw RejectionBudget("simulate: no acceptance within " +
                                  std::to_string(opts.rejection_budget) + " proposals for gap " +
                                  std::to_string(dt));
        for (int k = 0; k < L; ++k)
            if (!(v[k] > 0.0 && v[k] < 1.0))
                throw DataError(
                    "simulate: a sampled state rounds to the double-precision boundary at "
                    "time " +
                    std::to_string(ti) +
                    "; such paths cannot be written as interior observations (try a "
                    "different seed or x0)");
        u = v;
        omu = omv;
        out.times.push_back(ti);
        out.values.insert(out.values.end(), v.begin(), v.end());
        prev_time = ti;
    }
    if (total_proposals) *total_proposals = proposals;
    out.validate();
    return out;
}

}  // namespace wf
