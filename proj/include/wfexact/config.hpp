#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "wfexact/exactsim.hpp"
#include "wfexact/inference.hpp"
#include "wfexact/model.hpp"

namespace wf {

// Flat key = value configuration with typed accessors.  Values from the
// config file are overridden by CLI flags, which are overridden by the
// WF_SEED environment variable (CI hook).  All getters raise ConfigError
// naming the offending key.
class RunConfig {
  public:
    RunConfig() = default;
    static RunConfig from_file(const std::string& path);

    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    void apply_env();
    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_vector(const std::string& key) const;  // empty if absent

    const std::map<std::string, std::string>& entries() const { return kv_; }

    // Typed builders over the model / options blocks.
    std::unique_ptr<SelectionModel> build_model() const;
    ParameterDomain build_domain(const SelectionModel& model) const;
    // The theta point used by `simulate` (reduced coordinates for coupled).
    std::vector<double> simulation_theta(const SelectionModel& model) const;
    NeutralOptions neutral_options() const;
    SimOptions sim_options() const;
    OptimOptions optim_options() const;
    int threads() const;
    std::uint64_t seed() const { return get_u64("seed", 1); }

  private:
    std::map<std::string, std::string> kv_;
};

}  // namespace wf
