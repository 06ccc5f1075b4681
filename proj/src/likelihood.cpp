#include "wfexact/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "wfexact/special.hpp"
#include "wfexact/threading.hpp"

namespace wf {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct DrawBlockSpec {
    std::vector<int> loci_ids;
    double rho;
};

std::vector<DrawBlockSpec> make_draw_blocks(const SelectionModel& model,
                                            const ParameterDomain& domain) {
    std::vector<DrawBlockSpec> blocks;
    if (model.separable()) {
        for (int k = 0; k < model.loci(); ++k)
            blocks.push_back({{k}, model.locus_sam_rate(k, domain)});
    } else {
        std::vector<int> all(model.loci());
        for (int k = 0; k < model.loci(); ++k) all[k] = k;
        blocks.push_back({all, model.sam_rate(domain)});
    }
    return blocks;
}

// phi evaluator + lower bound for one block at fixed theta
struct BlockEval {
    double lo;
    double span;  // phi_plus - phi_minus, for domain validation only
};

BlockEval block_eval(const SelectionModel& model, std::span<const double> theta,
                     const ContributionDraws::Block& block) {
    if (block.loci_ids.size() == 1 && model.separable()) {
        PhiBounds b = model.locus_phi_bounds(block.loci_ids[0], theta);
        return {b.lo, b.hi - b.lo};
    }
    PhiBounds b = model.phi_bounds(theta);
    return {b.lo, b.hi - b.lo};
}

double block_phi(const SelectionModel& model, std::span<const double> theta,
                 const ContributionDraws::Block& block, std::span<const double> state) {
    if (block.loci_ids.size() == 1 && model.separable())
        return model.locus_phi(block.loci_ids[0], state[0], theta);
    return model.phi(state, theta);
}

}  // namespace

ContributionDraws draw_contribution(const SelectionModel& model, const ParameterDomain& domain,
                                    std::span<const double> x, std::span<const double> y,
                                    double t, int n_samples, std::uint64_t seed,
                                    std::uint64_t contribution_index, const NeutralOptions& opts,
                                    DrawStats* stats) {
    if (n_samples < 1) throw ConfigError("draw_contribution: need at least one sample");
    const int L = model.loci();
    const MutationRates& mu = model.mutation();

    ContributionDraws d;
    d.loci = L;
    d.t = t;
    d.x.assign(x.begin(), x.end());
    d.y.assign(y.begin(), y.end());
    d.n_samples = n_samples;
    d.m_draws.resize(static_cast<std::size_t>(n_samples) * L);
    d.log_density.resize(n_samples);

    // Block-count draws and the theta-free density factor.
    AncestralSeries series(t, mu.theta(), opts.ancestral);
    for (int j = 0; j < n_samples; ++j) {
        double ld = 0.0;
        for (int k = 0; k < L; ++k) {
            RngStream rng = RngStream::derive(
                seed, {stream::kAncestral, contribution_index, static_cast<std::uint64_t>(j),
                       static_cast<std::uint64_t>(k)});
            int m = series.sample(rng);
            d.m_draws[static_cast<std::size_t>(j) * L + k] = m;
            ld += log_density_given_m(m, x[k], y[k], 1.0 - y[k], mu);
        }
        d.log_density[j] = ld;
    }

    // Thinning blocks: Poisson times plus neutral bridge fills.
    const std::vector<DrawBlockSpec> specs = make_draw_blocks(model, domain);
    for (std::size_t b = 0; b < specs.size(); ++b) {
        const DrawBlockSpec& spec = specs[b];
        const std::size_t width = spec.loci_ids.size();
        ContributionDraws::Block block;
        block.loci_ids = spec.loci_ids;
        block.rho = spec.rho;
        block.offsets.assign(1, 0);
        for (int j = 0; j < n_samples; ++j) {
            RngStream prng = RngStream::derive(
                seed, {stream::kPoisson, contribution_index, static_cast<std::uint64_t>(j), b});
            std::vector<double> times = prng.poisson_times(spec.rho, t);
            const std::size_t base = block.times.size();
            block.times.insert(block.times.end(), times.begin(), times.end());
            block.values.resize(block.times.size() * width);
            for (std::size_t q = 0; q < width; ++q) {
                int k = spec.loci_ids[q];
                RngStream brng = RngStream::derive(
                    seed, {stream::kBridge, contribution_index, static_cast<std::uint64_t>(j), b,
                           static_cast<std::uint64_t>(k)});
                BridgeSkeleton sk = sample_bridge_skeleton(x[k], y[k], t, times, mu, brng, opts);
                for (std::size_t i = 0; i < times.size(); ++i)
                    block.values[(base + i) * width + q] = sk.values[i];
            }
            block.offsets.push_back(static_cast<int>(block.times.size()));
        }
        if (stats) {
            stats->poisson_points += block.times.size();
            stats->stored_values += block.values.size();
        }
        d.blocks.push_back(std::move(block));
    }
    return d;
}

std::vector<ContributionDraws> draw_all_contributions(const SelectionModel& model,
                                                      const ParameterDomain& domain,
                                                      const ObservationSeries& series,
                                                      int n_samples, std::uint64_t seed,
                                                      const NeutralOptions& opts, int threads,
                                                      DrawStats* stats) {
    series.validate();
    if (series.loci != model.loci()) throw DataError("series loci do not match the model");
    const int n = series.increments();
    std::vector<ContributionDraws> all(n);
    std::vector<DrawStats> per(n);
    parallel_for(n, threads, [&](std::size_t i) {
        double t = series.times[i + 1] - series.times[i];
        all[i] = draw_contribution(model, domain, series.state(static_cast<int>(i)),
                                   series.state(static_cast<int>(i) + 1), t, n_samples, seed,
                                   i, opts, &per[i]);
    });
    if (stats)
        for (const auto& p : per) {
            stats->poisson_points += p.poisson_points;
            stats->stored_values += p.stored_values;
        }
    return all;
}

namespace {

// Per-sample thinning product over all blocks; factors clamped only against
// rounding (a true excursion outside [0,1] means theta left the domain).
double sample_product(const ContributionDraws& d, const SelectionModel& model,
                      std::span<const double> theta, const std::vector<BlockEval>& evals, int j) {
    double prod = 1.0;
    for (std::size_t b = 0; b < d.blocks.size(); ++b) {
        const auto& block = d.blocks[b];
        const int width = static_cast<int>(block.loci_ids.size());
        for (int i = block.offsets[j]; i < block.offsets[j + 1]; ++i) {
            std::span<const double> state{block.values.data() +
                                              static_cast<std::size_t>(i) * width,
                                          static_cast<std::size_t>(width)};
            double phi = block_phi(model, theta, block, state);
            double g = (phi - evals[b].lo) / block.rho;
            if (g < -1e-9 || g > 1.0 + 1e-9)
                throw Error("a_estimate: thinning factor left [0,1]; theta outside the "
                            "domain the draws were built for");
            prod *= 1.0 - std::clamp(g, 0.0, 1.0);
        }
    }
    return prod;
}

std::vector<BlockEval> make_block_evals(const ContributionDraws& d, const SelectionModel& model,
                                        std::span<const double> theta,
                                        const ParameterDomain& domain) {
    if (!domain.contains(theta))
        throw Error("likelihood: theta outside the frozen-draw domain");
    std::vector<BlockEval> evals;
    evals.reserve(d.blocks.size());
    for (const auto& block : d.blocks) {
        BlockEval e = block_eval(model, theta, block);
        if (e.span > block.rho * (1.0 + 1e-9))
            throw Error("likelihood: phi span exceeds the frozen thinning rate");
        evals.push_back(e);
    }
    return evals;
}

}  // namespace

double a_estimate(const ContributionDraws& d, const SelectionModel& model,
                  std::span<const double> theta, const ParameterDomain& domain) {
    std::vector<BlockEval> evals = make_block_evals(d, model, theta, domain);
    double sum = 0.0;
    for (int j = 0; j < d.n_samples; ++j) sum += sample_product(d, model, theta, evals, j);
    return sum / d.n_samples;
}

namespace {

double log_prefactor(const ContributionDraws& d, const SelectionModel& model,
                     std::span<const double> theta, const std::vector<BlockEval>& evals) {
    double phi_lo = 0.0;
    for (const auto& e : evals) phi_lo += e.lo;
    return model.girsanov_A(d.y, theta) - model.girsanov_A(d.x, theta) - d.t * phi_lo;
}

}  // namespace

double log_contribution_estimate(const ContributionDraws& d, const SelectionModel& model,
                                 std::span<const double> theta, const ParameterDomain& domain) {
    std::vector<BlockEval> evals = make_block_evals(d, model, theta, domain);
    double a = 0.0;
    for (int j = 0; j < d.n_samples; ++j) a += sample_product(d, model, theta, evals, j);
    a /= d.n_samples;
    double log_dens = log_mean_exp(d.log_density);
    double pref = log_prefactor(d, model, theta, evals);
    return a > 0.0 ? pref + log_dens + std::log(a) : kNegInf;
}

SamLikelihood::SamLikelihood(const SelectionModel& model, const ParameterDomain& domain,
                             std::shared_ptr<const std::vector<ContributionDraws>> draws)
    : model_(model), domain_(domain), draws_(std::move(draws)) {
    if (!draws_ || draws_->empty()) throw Error("SamLikelihood: no draws");
    rebuild_density_cache();
}

void SamLikelihood::set_resample(std::vector<std::vector<int>> resample) {
    if (!resample.empty() && resample.size() != draws_->size())
        throw Error("SamLikelihood: resample size mismatch");
    resample_ = std::move(resample);
    rebuild_density_cache();
}

void SamLikelihood::set_observation_weights(std::vector<int> weights) {
    if (!weights.empty() && weights.size() != draws_->size())
        throw Error("SamLikelihood: weight size mismatch");
    observation_weights_ = std::move(weights);
}

void SamLikelihood::rebuild_density_cache() {
    cached_log_density_.resize(draws_->size());
    for (std::size_t i = 0; i < draws_->size(); ++i) {
        const auto& d = (*draws_)[i];
        if (resample_.empty()) {
            cached_log_density_[i] = log_mean_exp(d.log_density);
        } else {
            std::vector<double> sel;
            sel.reserve(resample_[i].size());
            for (int j : resample_[i]) sel.push_back(d.log_density[j]);
            cached_log_density_[i] = log_mean_exp(sel);
        }
    }
}

double SamLikelihood::contribution_log(std::size_t i, std::span<const double> theta) const {
    const auto& d = (*draws_)[i];
    std::vector<BlockEval> evals = make_block_evals(d, model_, theta, domain_);
    double a = 0.0;
    if (resample_.empty()) {
        for (int j = 0; j < d.n_samples; ++j) a += sample_product(d, model_, theta, evals, j);
        a /= d.n_samples;
    } else {
        for (int j : resample_[i]) a += sample_product(d, model_, theta, evals, j);
        a /= static_cast<double>(resample_[i].size());
    }
    double pref = log_prefactor(d, model_, theta, evals);
    return a > 0.0 ? pref + cached_log_density_[i] + std::log(a) : kNegInf;
}

double SamLikelihood::log_lik(std::span<const double> theta) const {
    double total = 0.0;
    for (std::size_t i = 0; i < draws_->size(); ++i) {
        int w = observation_weights_.empty() ? 1 : observation_weights_[i];
        if (w == 0) continue;
        double c = contribution_log(i, theta);
        if (c == kNegInf) return kNegInf;
        total += w * c;
    }
    return total;
}

LikelihoodEstimate SamLikelihood::evaluate(std::span<const double> theta) const {
    LikelihoodEstimate est;
    est.theta.assign(theta.begin(), theta.end());
    est.per_contribution.resize(draws_->size());
    est.log_value = 0.0;
    for (std::size_t i = 0; i < draws_->size(); ++i) {
        double c = contribution_log(i, theta);
        est.per_contribution[i] = c;
        if (c == kNegInf) {
            est.underflow = true;
            est.log_value = kNegInf;
        } else if (!est.underflow) {
            est.log_value += c;
        }
    }
    return est;
}

namespace {
constexpr int kCacheVersion = 1;
}

void save_draws(const std::string& path, const std::vector<ContributionDraws>& draws,
                std::uint64_t seed, double theta_a, double theta_A) {
    nlohmann::json root;
    root["version"] = kCacheVersion;
    root["seed"] = seed;
    root["theta_a"] = theta_a;
    root["theta_A"] = theta_A;
    root["loci"] = draws.empty() ? 1 : draws.front().loci;
    root["n_samples"] = draws.empty() ? 0 : draws.front().n_samples;
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& d : draws) {
        nlohmann::json jd;
        jd["loci"] = d.loci;
        jd["t"] = d.t;
        jd["x"] = d.x;
        jd["y"] = d.y;
        jd["n_samples"] = d.n_samples;
        jd["m_draws"] = d.m_draws;
        jd["log_density"] = d.log_density;
        nlohmann::json blocks = nlohmann::json::array();
        for (const auto& b : d.blocks) {
            nlohmann::json jb;
            jb["loci_ids"] = b.loci_ids;
            jb["rho"] = b.rho;
            jb["offsets"] = b.offsets;
            jb["times"] = b.times;
            jb["values"] = b.values;
            blocks.push_back(std::move(jb));
        }
        jd["blocks"] = std::move(blocks);
        arr.push_back(std::move(jd));
    }
    root["contributions"] = std::move(arr);
    std::ofstream out(path);
    if (!out) throw DataError("cache: cannot open " + path + " for writing");
    out << root.dump(2) << "\n";
}

std::vector<ContributionDraws> load_draws(const std::string& path, std::uint64_t* seed,
                                          double* theta_a, double* theta_A) {
    std::ifstream in(path);
    if (!in) throw DataError("cache: cannot open " + path);
    nlohmann::json root = nlohmann::json::parse(in, nullptr, true);
    if (root.at("version").get<int>() != kCacheVersion)
        throw DataError("cache: unsupported version");
    if (seed) *seed = root.at("seed").get<std::uint64_t>();
    if (theta_a) *theta_a = root.at("theta_a").get<double>();
    if (theta_A) *theta_A = root.at("theta_A").get<double>();
    std::vector<ContributionDraws> draws;
    for (const auto& jd : root.at("contributions")) {
        ContributionDraws d;
        d.loci = jd.at("loci").get<int>();
        d.t = jd.at("t").get<double>();
        d.x = jd.at("x").get<std::vector<double>>();
        d.y = jd.at("y").get<std::vector<double>>();
        d.n_samples = jd.at("n_samples").get<int>();
        d.m_draws = jd.at("m_draws").get<std::vector<int>>();
        d.log_density = jd.at("log_density").get<std::vector<double>>();
        for (const auto& jb : jd.at("blocks")) {
            ContributionDraws::Block b;
            b.loci_ids = jb.at("loci_ids").get<std::vector<int>>();
            b.rho = jb.at("rho").get<double>();
            b.offsets = jb.at("offsets").get<std::vector<int>>();
            b.times = jb.at("times").get<std::vector<double>>();
            b.values = jb.at("values").get<std::vector<double>>();
            d.blocks.push_back(std::move(b));
        }
        draws.push_back(std::move(d));
    }
    return draws;
}

}  // namespace wf
