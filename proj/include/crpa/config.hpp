#pragma once

// JSON experiment configuration.
//
//   {
//     "scenario":   { total_bw, k_count, fft_size, base_freq, pu_count, su_count,
//                     noise_var, p_max, pu_power, interference_cap },
//     "experiment": { axis, values, methods, trials, master_seed, output },
//     "sa":         { initial_temp, cooling_factor, epsilon, max_iters,
//                     perturb_scale, temp_floor_ratio, sweeps_per_temp, seed },
//     "dual":       { mu_min, mu_max, lambda_min, lambda_max, grid_points,
//                     refine_iters, inner_fixed_point_iters, inner_tol, weighting },
//     "brute":      { resolution_fraction }
//   }
//
// Every key is optional; missing keys take the defaults of ExperimentSpec and
// an empty file yields default_experiment(). When `experiment.values` is
// omitted it defaults per axis: p_max_dbw -20..15 step 2.5, pu_count {1,2,4},
// su_count {4,8,16}, k_count {8,16,32,64}, trace and snapshot {5}.
// Unknown keys are errors.

#include <filesystem>
#include <string>

#include "crpa/errors.hpp"
#include "crpa/harness.hpp"

namespace crpa {

/// Syntax errors carry "line L, column C"; semantic errors carry the key path
/// (e.g. "scenario.p_max").
class ConfigError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

ExperimentSpec parse_config(const std::string& text, const std::string& source = "<config>");
ExperimentSpec load_config(const std::filesystem::path& path);

/// Canonical, fully explicit JSON (sorted keys, two-space indent).
std::string dump_config(const ExperimentSpec& spec);

}  // namespace crpa
