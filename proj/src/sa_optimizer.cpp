#include "crpa/sa_optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace crpa {

void validate(const SaConfig& c) {
  if (!(c.initial_temp > 0.0)) throw InvalidArgument("sa.initial_temp must be > 0");
  if (!(c.cooling_factor > 0.0 && c.cooling_factor < 1.0)) {
    throw InvalidArgument("sa.cooling_factor must lie in (0, 1)");
  }
  if (!(c.epsilon > 0.0)) throw InvalidArgument("sa.epsilon must be > 0");
  if (c.max_iters == 0) throw InvalidArgument("sa.max_iters must be >= 1");
  if (!(c.perturb_scale >= 0.0)) throw InvalidArgument("sa.perturb_scale must be >= 0");
  if (!(c.temp_floor_ratio > 0.0)) throw InvalidArgument("sa.temp_floor_ratio must be > 0");
  if (c.sweeps_per_temp == 0) throw InvalidArgument("sa.sweeps_per_temp must be >= 1");
}

bool accept(double delta, double temperature, double r) {
  if (delta <= 0.0) return true;
  return std::exp(-delta / temperature) >= r;
}

PowerVector perturb(const PowerVector& p, double temperature, double p_max,
                    const SaConfig& config, std::mt19937_64& rng) {
  const double sigma = config.perturb_scale * p_max * (temperature / config.initial_temp);
  std::normal_distribution<double> jitter(0.0, 1.0);
  PowerVector out = p;
  for (auto& x : out) x = std::max(0.0, x + sigma * jitter(rng));
  return out;
}

PowerVector project_feasible(const Instance& inst, const PowerVector& p) {
  const auto& s = inst.scenario;
  double scale = 1.0;
  const double total = p.total();
  if (total > s.p_max) scale = std::min(scale, s.p_max / total);
  const auto interference = per_pu_interference(inst, p);
  for (std::size_t l = 0; l < interference.size(); ++l) {
    if (interference[l] > s.pus[l].interference_cap) {
      scale = std::min(scale, s.pus[l].interference_cap / interference[l]);
    }
  }
  if (scale == 1.0) return p;

  PowerVector out(p.size());
  for (int attempt = 0; attempt < 64; ++attempt) {
    for (std::size_t k = 0; k < p.size(); ++k) out[k] = p[k] * scale;
    if (check_feasible(inst, out, 0.0).feasible) return out;
    // Rounding left us a few ulps over a cap.
    scale *= 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
  }
  throw NumericalError("project_feasible: could not reach the feasible set by scaling");
}

namespace {

double max_abs_diff(const PowerVector& a, const PowerVector& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace

AllocationResult anneal(const Instance& inst, const SaConfig& config) {
  validate(config);
  const auto& sc = inst.scenario;
  const std::size_t k_count = inst.k_count();
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  AllocationResult res;
  res.method = "sa";

  // Random start spread over the budget, then scaled into the feasible set.
  PowerVector current(k_count);
  for (auto& x : current) x = sc.p_max * unit(rng) / static_cast<double>(k_count);
  current = project_feasible(inst, current);

  auto evaluate = [&](const PowerVector& p) {
    ++res.evals;
    const double c = total_capacity(inst, p);
    if (!std::isfinite(c)) {
      throw AnnealError("anneal: objective is not finite at iteration " +
                            std::to_string(res.trace.size()),
                        res.trace);
    }
    return c;
  };

  double current_cap = evaluate(current);
  PowerVector best = current;
  double best_cap = current_cap;
  double temperature = config.initial_temp;
  res.trace.reserve(std::min<std::size_t>(config.max_iters, 1 << 16));

  for (std::size_t t = 0; t < config.max_iters; ++t) {
    const auto candidate =
        project_feasible(inst, perturb(current, temperature, sc.p_max, config, rng));
    const double cand_cap = evaluate(candidate);
    const double delta = current_cap - cand_cap;  // E = -C
    const double r = unit(rng);
    const bool accepted = accept(delta, temperature, r);
    const double step = max_abs_diff(candidate, current);
    if (accepted) {
      current = candidate;
      current_cap = cand_cap;
      if (current_cap > best_cap) {
        best = current;
        best_cap = current_cap;
      }
    }
    res.trace.push_back({t, temperature, -current_cap, current_cap, accepted, best_cap});

    // Candidates are always feasible after projection, so the constraint
    // clause of the stop rule holds by construction.
    if (temperature < config.temp_floor() && step < config.epsilon) {
      res.converged = true;
      break;
    }
    if ((t + 1) % config.sweeps_per_temp == 0) temperature *= config.cooling_factor;
  }

  res.powers = best;
  res.capacity = best_cap;
  res.feasibility = check_feasible(inst, best, kReportTol);
  return res;
}

void write_trace_csv(std::ostream& os, const std::vector<TraceRow>& trace) {
  const auto old_precision = os.precision(17);
  os << "t,temperature,energy,capacity,accepted\n";
  for (const auto& row : trace) {
    os << row.t << ',' << row.temperature << ',' << row.energy << ',' << row.capacity << ','
       << (row.accepted ? 1 : 0) << '\n';
  }
  os.precision(old_precision);
}

}  // namespace crpa
