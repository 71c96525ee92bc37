#include "crpa/capacity.hpp"

#include <cmath>
#include <stdexcept>

#include "crpa/errors.hpp"

namespace crpa {

Instance make_instance(Scenario scenario, std::uint64_t channel_seed) {
  validate(scenario);
  auto channels = sample_channels(scenario, channel_seed);
  return make_instance(std::move(scenario), std::move(channels));
}

Instance make_instance(Scenario scenario, ChannelSet channels) {
  const auto geometry = compute_geometry(scenario);
  return make_instance(std::move(scenario), std::move(channels), geometry);
}

Instance make_instance(Scenario scenario, ChannelSet channels, const SpectralGeometry& geometry) {
  auto tables = build_tables(geometry, channels);
  return Instance{std::move(scenario), std::move(channels), std::move(tables)};
}

double noise_plus_interference(const Instance& inst, const PowerVector& p, std::size_t k) {
  return inst.scenario.noise_var + inst.tables.pu_interference_total[k] +
         su_to_su_interference(p, inst.channels, inst.tables, k);
}

double subcarrier_rate(const Instance& inst, const PowerVector& p, std::size_t k) {
  if (k >= inst.k_count()) throw std::out_of_range("subcarrier_rate: subcarrier out of range");
  if (p[k] == 0.0) return 0.0;
  const double signal = inst.channels.gain_ss_direct[k] * p[k];
  return std::log2(1.0 + signal / noise_plus_interference(inst, p, k));
}

double total_capacity(const Instance& inst, const PowerVector& p) {
  if (p.size() != inst.k_count()) {
    throw InvalidArgument("total_capacity: power vector length does not match K");
  }
  double c = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) c += subcarrier_rate(inst, p, k);
  return c;
}

std::vector<double> per_su_capacity(const Instance& inst, const PowerVector& p) {
  std::vector<double> out(inst.scenario.su_count, 0.0);
  for (std::size_t k = 0; k < p.size(); ++k) {
    out[inst.scenario.su_assignment[k]] += subcarrier_rate(inst, p, k);
  }
  return out;
}

std::vector<double> per_pu_interference(const Instance& inst, const PowerVector& p) {
  const std::size_t l_count = inst.scenario.pu_count();
  std::vector<double> out(l_count, 0.0);
  for (std::size_t l = 0; l < l_count; ++l) {
    for (std::size_t k = 0; k < p.size(); ++k) {
      out[l] += su_to_pu_interference(p[k], inst.channels.gain_sp(l, k),
                                      inst.tables.sp_factor(l, k));
    }
  }
  return out;
}

FeasibilityReport check_feasible(const Instance& inst, const PowerVector& p, double tol) {
  if (!(tol >= 0.0)) throw InvalidArgument("check_feasible: tol must be >= 0");
  FeasibilityReport r;
  r.total_power = p.total();
  r.power_ok = r.total_power <= inst.scenario.p_max * (1.0 + tol);
  r.per_pu_interference = per_pu_interference(inst, p);
  r.interference_ok.resize(r.per_pu_interference.size());
  bool all_caps = true;
  for (std::size_t l = 0; l < r.per_pu_interference.size(); ++l) {
    r.interference_ok[l] =
        r.per_pu_interference[l] <= inst.scenario.pus[l].interference_cap * (1.0 + tol);
    all_caps = all_caps && r.interference_ok[l];
  }
  r.nonneg_ok = p.size() == 0 || p.min() >= 0.0;
  r.feasible = r.power_ok && all_caps && r.nonneg_ok;
  return r;
}

}  // namespace crpa
