#pragma once

// Experiment sweeps over scenario parameters, with deterministic seeding and
// CSV output.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crpa/dual_baseline.hpp"
#include "crpa/model.hpp"
#include "crpa/result.hpp"
#include "crpa/sa_optimizer.hpp"

namespace crpa {

inline constexpr int kCsvSchemaVersion = 1;

/// Artifact version string baked in at build time.
const char* artifact_version();

/// Parameters from which a Scenario is laid out: a uniform grid, PU l on
/// subcarrier l with a band one subcarrier wide, round-robin SU assignment.
struct ScenarioTemplate {
  double total_bw = 12.8e6;
  std::size_t k_count = 32;
  std::size_t fft_size = 32;
  double base_freq = 0.0;
  std::size_t pu_count = 2;
  std::size_t su_count = 8;
  double noise_var = 1e-6;
  double p_max = 3.1622776601683795;  // 5 dBW
  double pu_power = 0.01;
  double interference_cap = 1e-3;
};

Scenario make_scenario(const ScenarioTemplate& t);

/// 32 subcarriers of 0.4 MHz, N = 32, 2 PUs, 8 SUs, noise 1e-6 W, PU power
/// 0.01 W, 1 mW cap per PU, p_max 5 dBW.
Scenario default_scenario();

double dbw_to_watts(double dbw);

enum class SweepAxis { p_max_dbw, pu_count, su_count, k_count, trace, snapshot };
enum class Method { sa, dual, brute };

const char* to_string(SweepAxis axis);
const char* to_string(Method method);
std::optional<SweepAxis> parse_axis(const std::string& s);
std::optional<Method> parse_method(const std::string& s);

struct ExperimentSpec {
  ScenarioTemplate scenario;
  SweepAxis axis = SweepAxis::p_max_dbw;
  std::vector<double> values;
  std::vector<Method> methods{Method::sa, Method::dual};
  std::size_t trials = 10;
  std::uint64_t master_seed = 2016;
  std::string output = "sweep.csv";
  SaConfig sa;
  DualConfig dual;
  /// Brute-force step as a fraction of p_max.
  double brute_resolution_fraction = 0.02;
};

/// The capacity-versus-budget sweep: p_max from -20 to 15 dBW in 2.5 dB steps, SA and dual.
ExperimentSpec default_experiment();

/// Throws InvalidArgument naming the offending key path.
void validate(const ExperimentSpec& spec);

/// Channel seed of trial `trial`. Independent of the axis value, so every
/// point of a sweep sees the same channel draws.
std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial);

/// The scenario at one axis value. Trace and snapshot axes sweep p_max in dBW.
Scenario scenario_at(const ExperimentSpec& spec, double axis_value);

/// Runs one method on one instance.
AllocationResult run_method(const Instance& inst, Method method, const ExperimentSpec& spec,
                            std::uint64_t trial_seed);

struct TrialRow {
  double axis_value = 0.0;
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  Method method = Method::sa;
  bool ok = false;
  std::string error;
  double capacity = 0.0;
  std::size_t evals = 0;
  std::size_t waterfill_evals = 0;
  bool feasible = false;
  double wall_ms = 0.0;
  PowerVector powers;
  std::vector<TraceRow> trace;
};

struct PointSummary {
  double axis_value = 0.0;
  Method method = Method::sa;
  std::size_t trials_ok = 0;
  std::size_t trials_failed = 0;
  std::size_t feasible = 0;
  double mean_capacity = 0.0;
  double std_capacity = 0.0;
  double mean_evals = 0.0;
  double mean_waterfill_evals = 0.0;
};

struct ExperimentResult {
  std::vector<TrialRow> rows;  // axis order, then trial, then method order
  std::vector<PointSummary> points;

  bool all_failed() const;
};

/// Runs every (axis value, trial) cell on a pool of `jobs` workers. Rows are
/// stored by cell index, so output order never depends on scheduling.
ExperimentResult run_experiment(const ExperimentSpec& spec, std::size_t jobs = 1);

/// Aggregates rows into per-(value, method) mean and sample std.
std::vector<PointSummary> summarize(const std::vector<TrialRow>& rows,
                                    const ExperimentSpec& spec);

/// FNV-1a 64-bit hash, hex encoded.
std::string fnv1a_hex(const std::string& text);

/// Main CSV: manifest comment header followed by one table whose columns
/// depend on the axis (aggregate, trace or snapshot). Byte-identical for
/// identical ExperimentSpec and seeds; wall time is excluded.
void write_experiment_csv(std::ostream& os, const ExperimentSpec& spec,
                          const ExperimentResult& result);

/// Per-trial rows: axis,value,trial,seed,method,ok,capacity,evals,waterfill_evals,feasible,error.
void write_trials_csv(std::ostream& os, const ExperimentSpec& spec,
                      const ExperimentResult& result);

/// Wall-clock timings, kept apart from the deterministic outputs.
void write_timing_csv(std::ostream& os, const ExperimentSpec& spec,
                      const ExperimentResult& result);

}  // namespace crpa
