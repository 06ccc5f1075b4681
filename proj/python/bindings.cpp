#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "wfexact/coupled.hpp"
#include "wfexact/exactsim.hpp"
#include "wfexact/inference.hpp"
#include "wfexact/io.hpp"
#include "wfexact/likelihood.hpp"
#include "wfexact/neutral.hpp"
#include "wfexact/selftest.hpp"
#include "wfexact/version.hpp"

namespace py = pybind11;
using namespace wf;

namespace {

NeutralOptions make_neutral_options(double t_min, bool approx_small_t, double bridge_eps) {
    NeutralOptions o;
    o.ancestral.t_min = t_min;
    o.ancestral.approx_small_t = approx_small_t;
    o.bridge_eps = bridge_eps;
    return o;
}

ObservationSeries series_from_lists(const std::vector<double>& times,
                                    const std::vector<std::vector<double>>& states) {
    ObservationSeries s;
    if (times.empty() || times.size() != states.size())
        throw DataError("series: times/states length mismatch");
    s.loci = static_cast<int>(states.front().size());
    s.times = times;
    for (const auto& row : states) {
        if (static_cast<int>(row.size()) != s.loci)
            throw DataError("series: ragged state rows");
        s.values.insert(s.values.end(), row.begin(), row.end());
    }
    s.validate();
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "exact Wright-Fisher diffusion simulation and unbiased Monte Carlo MLE";
    m.attr("__version__") = WFEXACT_VERSION;

    py::register_exception<TimeTooSmall>(m, "TimeTooSmallError");
    py::register_exception<TruncationBudget>(m, "TruncationBudgetError");
    py::register_exception<RejectionBudget>(m, "RejectionBudgetError");

    py::class_<MutationRates>(m, "MutationRates")
        .def(py::init<double, double>(), py::arg("theta_a"), py::arg("theta_A"))
        .def_readonly("theta_a", &MutationRates::theta_a)
        .def_readonly("theta_A", &MutationRates::theta_A)
        .def_property_readonly("theta", &MutationRates::theta)
        .def("alpha", &MutationRates::alpha, py::arg("x"));

    py::class_<HaploidModel>(m, "HaploidModel")
        .def(py::init<MutationRates>(), py::arg("mutation"))
        .def("phi", &HaploidModel::phi1, py::arg("x"), py::arg("theta"))
        .def("girsanov_a",
             [](const HaploidModel& self, double x, double theta) {
                 return self.girsanov_A({&x, 1}, {&theta, 1});
             })
        .def("phi_bounds",
             [](const HaploidModel& self, double theta) {
                 PhiBounds b = self.phi_bounds1(theta);
                 return std::make_pair(b.lo, b.hi);
             })
        .def("sam_rate", [](const HaploidModel& self, double lo, double hi) {
            return self.sam_rate(ParameterDomain::scalar(lo, hi));
        });

    py::class_<CoupledModel>(m, "CoupledModel")
        .def(py::init<int, MutationRates, bool>(), py::arg("loci"), py::arg("mutation"),
             py::arg("free_interactions"))
        .def_property_readonly("theta_dim", &CoupledModel::theta_dim)
        .def("phi",
             [](const CoupledModel& self, std::vector<double> x, std::vector<double> theta) {
                 return self.phi(x, theta);
             })
        .def("girsanov_a",
             [](const CoupledModel& self, std::vector<double> x, std::vector<double> theta) {
                 return self.girsanov_A(x, theta);
             })
        .def("coupling_term",
             [](const CoupledModel& self, std::vector<double> x, std::vector<double> theta) {
                 std::vector<double> g(x.size());
                 self.coupling_term(x, theta, g);
                 return g;
             });

    m.def("reduce_coupled_parameters",
          [](int loci, std::vector<double> s, std::vector<double> h, bool free_interactions) {
              return reduce_coupled_parameters(loci, s, h, free_interactions);
          },
          py::arg("loci"), py::arg("s"), py::arg("h"), py::arg("free_interactions") = true);

    m.def(
        "q_pmf",
        [](int m_block, double t, double theta, double tol) {
            return q_pmf_oracle(m_block, t, theta, tol);
        },
        py::arg("m"), py::arg("t"), py::arg("theta"), py::arg("tol") = 1e-12,
        "certified block-count pmf value");

    m.def(
        "sample_block_counts",
        [](double t, double theta, int n, std::uint64_t seed, bool approx_small_t) {
            AncestralOptions opts;
            opts.approx_small_t = approx_small_t;
            AncestralSeries series(t, theta, opts);
            std::vector<int> out(n);
            for (int i = 0; i < n; ++i) {
                RngStream rng = RngStream::derive(seed, {stream::kAncestral,
                                                         static_cast<std::uint64_t>(i)});
                out[i] = series.sample(rng);
            }
            return out;
        },
        py::arg("t"), py::arg("theta"), py::arg("n"), py::arg("seed") = 1,
        py::arg("approx_small_t") = false);

    m.def(
        "transition_density",
        [](double x, double y, double t, double theta_a, double theta_A, double tol) {
            return transition_density_oracle(x, y, t, MutationRates(theta_a, theta_A), tol);
        },
        py::arg("x"), py::arg("y"), py::arg("t"), py::arg("theta_a"), py::arg("theta_A"),
        py::arg("tol") = 1e-10, "deterministic double-series evaluation");

    m.def(
        "sample_transition",
        [](double x, double t, double theta_a, double theta_A, int n, std::uint64_t seed) {
            MutationRates mu(theta_a, theta_A);
            AncestralSeries series(t, mu.theta());
            std::vector<double> out(n);
            for (int i = 0; i < n; ++i) {
                RngStream rng = RngStream::derive(seed, {stream::kTransition,
                                                         static_cast<std::uint64_t>(i)});
                out[i] = sample_transition(x, series, mu, rng).y;
            }
            return out;
        },
        py::arg("x"), py::arg("t"), py::arg("theta_a"), py::arg("theta_A"), py::arg("n") = 1,
        py::arg("seed") = 1);

    m.def(
        "sample_bridge",
        [](double x, double y, double t, std::vector<double> times, double theta_a,
           double theta_A, std::uint64_t seed, bool approx_small_t) {
            RngStream rng = RngStream::derive(seed, {stream::kBridge});
            BridgeSkeleton sk =
                sample_bridge_skeleton(x, y, t, times, MutationRates(theta_a, theta_A), rng,
                                       make_neutral_options(0.1, approx_small_t, 1e-5));
            return std::make_pair(sk.times, sk.values);
        },
        py::arg("x"), py::arg("y"), py::arg("t"), py::arg("times"), py::arg("theta_a"),
        py::arg("theta_A"), py::arg("seed") = 1, py::arg("approx_small_t") = false);

    m.def(
        "simulate_haploid",
        [](double theta, double theta_a, double theta_A, double x0, int n, double dt,
           std::uint64_t seed) {
            HaploidModel model(MutationRates(theta_a, theta_A));
            SimOptions opts;
            opts.neutral.ancestral.approx_small_t = true;
            std::vector<double> obs(n);
            for (int i = 0; i < n; ++i) obs[i] = (i + 1) * dt;
            RngStream rng = RngStream::derive(seed, {stream::kTransition, 7777});
            ObservationSeries s = simulate_path(model, {&theta, 1}, {&x0, 1}, obs, rng, opts);
            return std::make_pair(s.times, s.values);
        },
        py::arg("theta"), py::arg("theta_a") = 0.02, py::arg("theta_A") = 0.02,
        py::arg("x0") = 0.5, py::arg("n") = 100, py::arg("dt") = 1.0, py::arg("seed") = 1,
        "exact discrete observations of the selected diffusion");

    m.def(
        "estimate_haploid",
        [](std::vector<double> times, std::vector<double> values, double theta_a, double theta_A,
           double bound, int n_samples, std::uint64_t seed, int bootstrap_B, int threads) {
            std::vector<std::vector<double>> rows;
            rows.reserve(values.size());
            for (double v : values) rows.push_back({v});
            ObservationSeries series = series_from_lists(times, rows);
            HaploidModel model(MutationRates(theta_a, theta_A));
            ParameterDomain box = ParameterDomain::scalar(-bound, bound);
            EstimateOptions opts;
            opts.n_samples = n_samples;
            opts.seed = seed;
            opts.neutral.ancestral.approx_small_t = true;
            opts.threads = threads;
            opts.bootstrap_B = bootstrap_B;
            MleResult r = estimate_mle(model, box, series, opts);
            py::dict out;
            out["theta_hat"] = r.theta_hat[0];
            out["log_lik"] = r.log_lik;
            out["evaluations"] = r.evaluations;
            out["converged"] = r.converged;
            if (!r.bootstrap_se.empty()) out["bootstrap_se"] = r.bootstrap_se[0];
            return out;
        },
        py::arg("times"), py::arg("values"), py::arg("theta_a") = 0.02,
        py::arg("theta_A") = 0.02, py::arg("bound") = 2.0, py::arg("n_samples") = 100,
        py::arg("seed") = 1, py::arg("bootstrap_B") = 0, py::arg("threads") = 1,
        "frozen-draw Monte Carlo MLE of the selection parameter");

    m.def(
        "loglik_curve",
        [](std::vector<double> times, std::vector<double> values, std::vector<double> grid,
           double theta_a, double theta_A, double bound, int n_samples, std::uint64_t seed,
           int threads) {
            std::vector<std::vector<double>> rows;
            rows.reserve(values.size());
            for (double v : values) rows.push_back({v});
            ObservationSeries series = series_from_lists(times, rows);
            HaploidModel model(MutationRates(theta_a, theta_A));
            ParameterDomain box = ParameterDomain::scalar(-bound, bound);
            NeutralOptions nopts;
            nopts.ancestral.approx_small_t = true;
            auto draws = std::make_shared<std::vector<ContributionDraws>>(
                draw_all_contributions(model, box, series, n_samples, seed, nopts, threads));
            SamLikelihood lik(model, box, draws);
            std::vector<double> out;
            out.reserve(grid.size());
            for (double th : grid) out.push_back(lik.log_lik({&th, 1}));
            return out;
        },
        py::arg("times"), py::arg("values"), py::arg("grid"), py::arg("theta_a") = 0.02,
        py::arg("theta_A") = 0.02, py::arg("bound") = 2.0, py::arg("n_samples") = 100,
        py::arg("seed") = 1, py::arg("threads") = 1,
        "frozen-draw log likelihood on a parameter grid");

    m.def(
        "selftest_quick",
        [](int threads) {
            py::list out;
            for (const auto& r : selftest::run_quick(threads)) {
                py::dict d;
                d["name"] = r.name;
                d["pass"] = r.pass;
                d["detail"] = r.detail;
                out.append(d);
            }
            return out;
        },
        py::arg("threads") = 1);
}
