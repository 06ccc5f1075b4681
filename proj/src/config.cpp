#include "wfexact/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "wfexact/coupled.hpp"

namespace wf {

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    RunConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = line;
        if (auto pos = s.find('#'); pos != std::string::npos) s.erase(pos);
        auto notspace = [](unsigned char c) { return !std::isspace(c); };
        s.erase(s.begin(), std::find_if(s.begin(), s.end(), notspace));
        s.erase(std::find_if(s.rbegin(), s.rend(), notspace).base(), s.end());
        if (s.empty()) continue;
        auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: " + path + ":" + std::to_string(lineno) +
                              ": expected key = value");
        std::string key = s.substr(0, eq);
        std::string val = s.substr(eq + 1);
        key.erase(std::find_if(key.rbegin(), key.rend(), notspace).base(), key.end());
        val.erase(val.begin(), std::find_if(val.begin(), val.end(), notspace));
        if (key.empty())
            throw ConfigError("config: " + path + ":" + std::to_string(lineno) + ": empty key");
        cfg.kv_[key] = val;
    }
    return cfg;
}

void RunConfig::apply_env() {
    if (const char* s = std::getenv("WF_SEED")) kv_["seed"] = s;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
}

std::string RunConfig::require_string(const std::string& key) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("config: missing required key '" + key + "'");
    return it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        std::size_t used = 0;
        double v = std::stod(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not a number: " + it->second);
    }
}

int RunConfig::get_int(const std::string& key, int fallback) const {
    double v = get_double(key, fallback);
    int i = static_cast<int>(v);
    if (v != i) throw ConfigError("config: key '" + key + "' must be an integer");
    return i;
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' is not an unsigned integer: " + it->second);
    }
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "1" || v == "true" || v == "on" || v == "yes") return true;
    if (v == "0" || v == "false" || v == "off" || v == "no") return false;
    throw ConfigError("config: key '" + key + "' is not a boolean: " + v);
}

std::vector<double> RunConfig::get_vector(const std::string& key) const {
    auto it = kv_.find(key);
    std::vector<double> out;
    if (it == kv_.end()) return out;
    std::istringstream ss(it->second);
    std::string tok;
    while (ss >> tok) {
        // commas are allowed as separators
        if (!tok.empty() && tok.back() == ',') tok.pop_back();
        if (tok.empty()) continue;
        try {
            out.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw ConfigError("config: key '" + key + "' has a non-numeric entry: " + tok);
        }
    }
    return out;
}

std::unique_ptr<SelectionModel> RunConfig::build_model() const {
    MutationRates mu(get_double("theta_a", 0.0), get_double("theta_A", 0.0));
    std::string kind = get_string("model", "haploid");
    if (kind == "haploid") return std::make_unique<HaploidModel>(mu);
    if (kind == "coupled") {
        int L = get_int("loci", 0);
        if (L < 1) throw ConfigError("config: coupled model requires loci >= 1");
        bool free_inter;
        std::string inter = get_string("interactions", "auto");
        std::vector<double> h = get_vector("h");
        if (inter == "free")
            free_inter = true;
        else if (inter == "none")
            free_inter = false;
        else if (inter == "auto") {
            free_inter = false;
            for (double v : h)
                if (v != 0.0) free_inter = true;
        } else
            throw ConfigError("config: interactions must be none|free|auto");
        return std::make_unique<CoupledModel>(L, mu, free_inter);
    }
    throw ConfigError("config: model must be haploid|coupled");
}

std::vector<double> RunConfig::simulation_theta(const SelectionModel& model) const {
    if (model.name() == "haploid") {
        return {get_double("theta", 0.0)};
    }
    const auto& cm = dynamic_cast<const CoupledModel&>(model);
    const int L = cm.loci();
    std::vector<double> s = get_vector("s");
    std::vector<double> h = get_vector("h");
    if (s.empty()) s.assign(2 * L, 0.0);
    if (h.empty()) h.assign(4 * L * L, 0.0);
    return reduce_coupled_parameters(L, s, h, cm.free_interactions());
}

ParameterDomain RunConfig::build_domain(const SelectionModel& model) const {
    const std::size_t dim = static_cast<std::size_t>(model.theta_dim());
    std::vector<double> lo = get_vector("theta_lower");
    std::vector<double> hi = get_vector("theta_upper");
    if (lo.empty() && hi.empty() && dim == 1) {
        double c = get_double("theta_bound", 1.0);
        lo = {-c};
        hi = {c};
    }
    if (lo.size() != dim || hi.size() != dim)
        throw ConfigError("config: theta_lower/theta_upper must each have " +
                          std::to_string(dim) + " entries");
    return ParameterDomain(lo, hi);
}

NeutralOptions RunConfig::neutral_options() const {
    NeutralOptions opts;
    opts.ancestral.t_min = get_double("t_min", opts.ancestral.t_min);
    opts.ancestral.approx_small_t = get_bool("approx_small_t", opts.ancestral.approx_small_t);
    opts.ancestral.term_budget = get_int("term_budget", opts.ancestral.term_budget);
    opts.ancestral.m_budget = get_int("m_budget", opts.ancestral.m_budget);
    opts.bridge_eps = get_double("bridge_eps", opts.bridge_eps);
    return opts;
}

SimOptions RunConfig::sim_options() const {
    SimOptions opts;
    opts.neutral = neutral_options();
    opts.rejection_budget = static_cast<long>(get_double("rejection_budget", 1e6));
    return opts;
}

OptimOptions RunConfig::optim_options() const {
    OptimOptions opts;
    opts.xtol = get_double("xtol", opts.xtol);
    opts.max_eval = get_int("max_eval", opts.max_eval);
    opts.multistart = get_int("multistart", opts.multistart);
    return opts;
}

int RunConfig::threads() const {
    int t = get_int("threads", 0);
    if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
    return t > 0 ? t : 1;
}

}  // namespace wf
