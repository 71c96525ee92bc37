#pragma once

// Objective and constraint evaluation.
//
// Capacity is reported as spectral efficiency (bits/s/Hz summed over
// subcarriers); multiply by the subcarrier bandwidth for bits/s.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "crpa/model.hpp"
#include "crpa/spectral.hpp"

namespace crpa {

/// Everything an optimizer needs: the scenario, one channel draw and the
/// interference tables built from both.
struct Instance {
  Scenario scenario;
  ChannelSet channels;
  InterferenceTables tables;

  std::size_t k_count() const { return scenario.k_count(); }
};

Instance make_instance(Scenario scenario, std::uint64_t channel_seed);
Instance make_instance(Scenario scenario, ChannelSet channels);
Instance make_instance(Scenario scenario, ChannelSet channels, const SpectralGeometry& geometry);

struct FeasibilityReport {
  double total_power = 0.0;
  bool power_ok = false;
  std::vector<double> per_pu_interference;
  std::vector<bool> interference_ok;
  bool nonneg_ok = false;
  bool feasible = false;

  bool operator==(const FeasibilityReport&) const = default;
};

/// sigma^2 + sum_l J_k^{(l)} + sum_{i != k} IN_{i->k}: everything in the rate
/// denominator except the signal.
double noise_plus_interference(const Instance& inst, const PowerVector& p, std::size_t k);

/// log2(1 + g_kk p_k / (noise + interference)).
double subcarrier_rate(const Instance& inst, const PowerVector& p, std::size_t k);

double total_capacity(const Instance& inst, const PowerVector& p);

/// Capacity grouped by the SU that owns each subcarrier.
std::vector<double> per_su_capacity(const Instance& inst, const PowerVector& p);

/// sum_k I_k^l(p_k) for each PU l.
std::vector<double> per_pu_interference(const Instance& inst, const PowerVector& p);

/// Relative tolerance applies to both the power budget and each PU cap.
/// At tol = 0 every comparison is exact.
FeasibilityReport check_feasible(const Instance& inst, const PowerVector& p, double tol);

}  // namespace crpa
