#pragma once

// Lagrange-dual water-filling baseline and a brute-force grid oracle.

#include <cstddef>

#include "crpa/capacity.hpp"
#include "crpa/result.hpp"

namespace crpa {

/// How the interference multiplier enters the per-subcarrier water level.
///  - literal:  level = 1 / ((mu + lambda) ln 2), lambda shared by every
///              subcarrier regardless of its leakage into the PU bands.
///  - gradient: level = 1 / ((mu + lambda * a_k) ln 2) with a_k the
///              derivative of the aggregate PU interference in p_k.
enum class DualWeighting { literal, gradient };

struct DualConfig {
  double mu_min = 1e-6;
  double mu_max = 1e3;
  double lambda_min = 1e-6;
  double lambda_max = 1e3;
  std::size_t grid_points = 40;
  std::size_t refine_iters = 30;
  std::size_t inner_fixed_point_iters = 20;
  double inner_tol = 1e-8;
  DualWeighting weighting = DualWeighting::literal;
};

void validate(const DualConfig& config);

/// Closed-form power for subcarrier k:
/// max{0, 1 / ((mu + lambda * weight) ln 2) - (sigma^2 + interference) / g_kk}.
/// `interference_at_k` is the PU plus SU interference in watts. Returns 0
/// when g_kk is 0. Requires mu + lambda * weight > 0.
double waterfill_power(const Instance& inst, double mu, double lambda, std::size_t k,
                       double interference_at_k, double weight = 1.0);

/// Grid search over (mu, lambda), a Jacobi fixed point for the SU-SU
/// coupling at every grid point, and coordinate bisection toward the active
/// constraint. Returns the feasible allocation of largest capacity. When no
/// grid point is feasible (a budget below the lowest reachable water level)
/// the search walks the diagonal beyond the range until one is.
AllocationResult solve_dual(const Instance& inst, const DualConfig& config);

/// Largest K brute_force accepts.
inline constexpr std::size_t kBruteForceMaxK = 6;

/// Exhaustive search over powers in {0, d, 2d, ...} with sum <= p_max and
/// every PU cap met. Ties go to the lexicographically smallest vector.
/// Throws InvalidArgument when K > kBruteForceMaxK or resolution <= 0.
AllocationResult brute_force(const Instance& inst, double resolution);

}  // namespace crpa
