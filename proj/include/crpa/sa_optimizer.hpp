#pragma once

// Simulated-annealing power allocator.
//
// Energy is negated capacity. A candidate is a Gaussian jitter of the current
// allocation, pulled back into the feasible set by radial scaling, then
// accepted with the Metropolis rule exp(-delta / T) >= r. Temperature follows
// T0 * cooling^t, stepping once every `sweeps_per_temp` candidates.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "crpa/capacity.hpp"
#include "crpa/errors.hpp"
#include "crpa/result.hpp"

namespace crpa {

struct SaConfig {
  double initial_temp = 100.0;
  double cooling_factor = 0.95;
  double epsilon = 1e-6;
  std::size_t max_iters = 50000;
  /// Jitter standard deviation at T0, as a fraction of p_max.
  double perturb_scale = 5.0;
  /// The "temperature is small" threshold of the stop rule, relative to T0.
  double temp_floor_ratio = 1e-6;
  /// Candidates per temperature step.
  std::size_t sweeps_per_temp = 100;
  std::uint64_t seed = 1;

  double temp_floor() const { return temp_floor_ratio * initial_temp; }
};

/// Throws InvalidArgument naming the offending sa.* field.
void validate(const SaConfig& config);

/// Metropolis acceptance with Boltzmann constant 1.
bool accept(double delta, double temperature, double r);

/// Zero-mean Gaussian jitter with per-entry sigma
/// perturb_scale * p_max * (temperature / initial_temp), clamped at 0.
PowerVector perturb(const PowerVector& p, double temperature, double p_max,
                    const SaConfig& config, std::mt19937_64& rng);

/// Largest s <= 1 such that s * p meets the power budget and every PU cap
/// exactly (tolerance 0).
PowerVector project_feasible(const Instance& inst, const PowerVector& p);

/// Raised when the objective turns non-finite mid-run; carries the trace so
/// far.
class AnnealError : public NumericalError {
 public:
  AnnealError(const std::string& what, std::vector<TraceRow> trace)
      : NumericalError(what), trace_(std::move(trace)) {}
  const std::vector<TraceRow>& trace() const { return trace_; }

 private:
  std::vector<TraceRow> trace_;
};

/// Returns the best feasible allocation visited, with the full trace.
AllocationResult anneal(const Instance& inst, const SaConfig& config);

}  // namespace crpa
