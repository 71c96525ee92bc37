#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crpa/capacity.hpp"
#include "crpa/model.hpp"

namespace crpa {

/// Relative tolerance used for the feasibility report attached to every
/// AllocationResult. Brute-force grid points land on p_max up to rounding.
inline constexpr double kReportTol = 1e-12;

struct TraceRow {
  std::size_t t = 0;
  double temperature = 0.0;
  double energy = 0.0;    // -capacity of the current state
  double capacity = 0.0;  // capacity of the current state
  bool accepted = false;
  double best_capacity = 0.0;
};

/// Multipliers and inner-loop status of a dual solve.
struct DualInfo {
  /// Multipliers attributed to the constraints; zero for a slack constraint.
  double mu = 0.0;
  double lambda = 0.0;
  /// Raw grid coordinates of the selected point.
  double grid_mu = 0.0;
  double grid_lambda = 0.0;
  bool power_tight = false;
  bool interference_tight = false;
  bool fixed_point_converged = false;
};

struct AllocationResult {
  std::string method;
  PowerVector powers;
  double capacity = 0.0;
  FeasibilityReport feasibility;
  std::vector<TraceRow> trace;
  /// Full objective (total capacity) evaluations.
  std::size_t evals = 0;
  /// Closed-form per-subcarrier power evaluations (dual only).
  std::size_t waterfill_evals = 0;
  /// SA: stopped by the convergence rule rather than the iteration cap.
  bool converged = false;
  std::optional<DualInfo> dual;
};

/// Trace CSV: t,temperature,energy,capacity,accepted.
void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace);

}  // namespace crpa
