#include "crpa/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace crpa {

using nlohmann::json;

namespace {

std::vector<double> default_values(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::p_max_dbw: return default_experiment().values;
    case SweepAxis::pu_count: return {1, 2, 4};
    case SweepAxis::su_count: return {4, 8, 16};
    case SweepAxis::k_count: return {8, 16, 32, 64};
    case SweepAxis::trace:
    case SweepAxis::snapshot: return {5};
  }
  return {};
}

// Reads one section, rejecting unknown keys.
class Section {
 public:
  Section(const json& root, const std::string& name, std::set<std::string> keys)
      : name_(name) {
    if (!root.contains(name)) return;
    node_ = &root.at(name);
    if (!node_->is_object()) throw ConfigError(name + " must be an object");
    for (const auto& [key, value] : node_->items()) {
      if (!keys.contains(key)) throw ConfigError("unknown key " + path(key));
    }
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

  void number(const std::string& key, double& out) const {
    if (const auto* v = find(key)) {
      if (!v->is_number()) throw ConfigError(path(key) + " must be a number");
      out = v->get<double>();
    }
  }

  template <class Int>
  void integer(const std::string& key, Int& out) const {
    if (const auto* v = find(key)) {
      if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<long long>() < 0)) {
        throw ConfigError(path(key) + " must be a non-negative integer");
      }
      out = static_cast<Int>(v->get<std::uint64_t>());
    }
  }

  void string(const std::string& key, std::string& out) const {
    if (const auto* v = find(key)) {
      if (!v->is_string()) throw ConfigError(path(key) + " must be a string");
      out = v->get<std::string>();
    }
  }

  const json* find(const std::string& key) const {
    if (node_ == nullptr || !node_->contains(key)) return nullptr;
    return &node_->at(key);
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
};

std::string line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  const std::size_t end = std::min(byte > 0 ? byte - 1 : 0, text.size());
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

ExperimentSpec parse_config(const std::string& text, const std::string& source) {
  ExperimentSpec spec = default_experiment();
  if (std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); })) {
    return spec;
  }

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": parse error at " + line_column(text, e.byte) + ": " +
                      e.what());
  }
  if (!root.is_object()) throw ConfigError(source + ": top level must be an object");
  for (const auto& [key, value] : root.items()) {
    static const std::set<std::string> sections{"scenario", "experiment", "sa", "dual",
                                                "brute"};
    if (!sections.contains(key)) throw ConfigError(source + ": unknown key " + key);
  }

  try {
    auto& t = spec.scenario;
    const Section sc(root, "scenario",
                     {"total_bw", "k_count", "fft_size", "base_freq", "pu_count", "su_count",
                      "noise_var", "p_max", "pu_power", "interference_cap"});
    sc.number("total_bw", t.total_bw);
    sc.integer("k_count", t.k_count);
    sc.integer("fft_size", t.fft_size);
    sc.number("base_freq", t.base_freq);
    sc.integer("pu_count", t.pu_count);
    sc.integer("su_count", t.su_count);
    sc.number("noise_var", t.noise_var);
    sc.number("p_max", t.p_max);
    sc.number("pu_power", t.pu_power);
    sc.number("interference_cap", t.interference_cap);

    const Section ex(root, "experiment",
                     {"axis", "values", "methods", "trials", "master_seed", "output"});
    if (const auto* v = ex.find("axis")) {
      const auto axis = v->is_string() ? parse_axis(v->get<std::string>()) : std::nullopt;
      if (!axis) throw ConfigError(ex.path("axis") + " is not a known axis");
      spec.axis = *axis;
      spec.values = default_values(spec.axis);
    }
    if (const auto* v = ex.find("values")) {
      if (!v->is_array()) throw ConfigError(ex.path("values") + " must be an array");
      spec.values.clear();
      for (const auto& x : *v) {
        if (!x.is_number()) throw ConfigError(ex.path("values") + " must hold numbers");
        spec.values.push_back(x.get<double>());
      }
    }
    if (const auto* v = ex.find("methods")) {
      if (!v->is_array()) throw ConfigError(ex.path("methods") + " must be an array");
      spec.methods.clear();
      for (const auto& x : *v) {
        const auto m = x.is_string() ? parse_method(x.get<std::string>()) : std::nullopt;
        if (!m) throw ConfigError(ex.path("methods") + " holds an unknown method");
        spec.methods.push_back(*m);
      }
    }
    ex.integer("trials", spec.trials);
    ex.integer("master_seed", spec.master_seed);
    ex.string("output", spec.output);

    auto& sa = spec.sa;
    const Section sa_sec(root, "sa",
                         {"initial_temp", "cooling_factor", "epsilon", "max_iters",
                          "perturb_scale", "temp_floor_ratio", "sweeps_per_temp", "seed"});
    sa_sec.number("initial_temp", sa.initial_temp);
    sa_sec.number("cooling_factor", sa.cooling_factor);
    sa_sec.number("epsilon", sa.epsilon);
    sa_sec.integer("max_iters", sa.max_iters);
    sa_sec.number("perturb_scale", sa.perturb_scale);
    sa_sec.number("temp_floor_ratio", sa.temp_floor_ratio);
    sa_sec.integer("sweeps_per_temp", sa.sweeps_per_temp);
    sa_sec.integer("seed", sa.seed);

    auto& d = spec.dual;
    const Section du(root, "dual",
                     {"mu_min", "mu_max", "lambda_min", "lambda_max", "grid_points",
                      "refine_iters", "inner_fixed_point_iters", "inner_tol", "weighting"});
    du.number("mu_min", d.mu_min);
    du.number("mu_max", d.mu_max);
    du.number("lambda_min", d.lambda_min);
    du.number("lambda_max", d.lambda_max);
    du.integer("grid_points", d.grid_points);
    du.integer("refine_iters", d.refine_iters);
    du.integer("inner_fixed_point_iters", d.inner_fixed_point_iters);
    du.number("inner_tol", d.inner_tol);
    std::string weighting = d.weighting == DualWeighting::literal ? "literal" : "gradient";
    du.string("weighting", weighting);
    if (weighting == "literal") {
      d.weighting = DualWeighting::literal;
    } else if (weighting == "gradient") {
      d.weighting = DualWeighting::gradient;
    } else {
      throw ConfigError(du.path("weighting") + " must be \"literal\" or \"gradient\"");
    }

    const Section br(root, "brute", {"resolution_fraction"});
    br.number("resolution_fraction", spec.brute_resolution_fraction);

    validate(spec);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return spec;
}

ExperimentSpec load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str(), path.string());
}

std::string dump_config(const ExperimentSpec& spec) {
  const auto& t = spec.scenario;
  json methods = json::array();
  for (auto m : spec.methods) methods.push_back(to_string(m));
  json root = {
      {"scenario",
       {{"total_bw", t.total_bw},
        {"k_count", t.k_count},
        {"fft_size", t.fft_size},
        {"base_freq", t.base_freq},
        {"pu_count", t.pu_count},
        {"su_count", t.su_count},
        {"noise_var", t.noise_var},
        {"p_max", t.p_max},
        {"pu_power", t.pu_power},
        {"interference_cap", t.interference_cap}}},
      {"experiment",
       {{"axis", to_string(spec.axis)},
        {"values", spec.values},
        {"methods", methods},
        {"trials", spec.trials},
        {"master_seed", spec.master_seed},
        {"output", spec.output}}},
      {"sa",
       {{"initial_temp", spec.sa.initial_temp},
        {"cooling_factor", spec.sa.cooling_factor},
        {"epsilon", spec.sa.epsilon},
        {"max_iters", spec.sa.max_iters},
        {"perturb_scale", spec.sa.perturb_scale},
        {"temp_floor_ratio", spec.sa.temp_floor_ratio},
        {"sweeps_per_temp", spec.sa.sweeps_per_temp},
        {"seed", spec.sa.seed}}},
      {"dual",
       {{"mu_min", spec.dual.mu_min},
        {"mu_max", spec.dual.mu_max},
        {"lambda_min", spec.dual.lambda_min},
        {"lambda_max", spec.dual.lambda_max},
        {"grid_points", spec.dual.grid_points},
        {"refine_iters", spec.dual.refine_iters},
        {"inner_fixed_point_iters", spec.dual.inner_fixed_point_iters},
        {"inner_tol", spec.dual.inner_tol},
        {"weighting",
         spec.dual.weighting == DualWeighting::literal ? "literal" : "gradient"}}},
      {"brute", {{"resolution_fraction", spec.brute_resolution_fraction}}},
  };
  return root.dump(2) + "\n";
}

}  // namespace crpa
