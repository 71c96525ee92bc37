#include "crpa/dual_baseline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "crpa/errors.hpp"

namespace crpa {

void validate(const DualConfig& c) {
  if (!(c.mu_min > 0.0 && c.mu_max > c.mu_min)) {
    throw InvalidArgument("dual.mu range must satisfy 0 < mu_min < mu_max");
  }
  if (!(c.lambda_min > 0.0 && c.lambda_max > c.lambda_min)) {
    throw InvalidArgument("dual.lambda range must satisfy 0 < lambda_min < lambda_max");
  }
  if (c.grid_points < 2) throw InvalidArgument("dual.grid_points must be >= 2");
  if (!(c.inner_tol > 0.0)) throw InvalidArgument("dual.inner_tol must be > 0");
}

double waterfill_power(const Instance& inst, double mu, double lambda, std::size_t k,
                       double interference_at_k, double weight) {
  const double gain = inst.channels.gain_ss_direct[k];
  if (gain == 0.0) return 0.0;
  const double price = mu + lambda * weight;
  if (!(price > 0.0)) throw InvalidArgument("waterfill_power: mu + lambda must be > 0");
  const double level = 1.0 / (price * std::numbers::ln2);
  const double floor = (inst.scenario.noise_var + interference_at_k) / gain;
  return std::max(0.0, level - floor);
}

namespace {

constexpr int kMaxExtraDecades = 30;
// Relative slack below which a constraint counts as binding.
constexpr double kTightTol = 1e-6;

struct GridPoint {
  double mu = 0.0;
  double lambda = 0.0;
  PowerVector p;
  double capacity = 0.0;
  bool feasible = false;
  bool converged = false;
};

bool better(const GridPoint& a, const GridPoint& b) {
  if (!a.feasible) return false;
  if (!b.feasible) return true;
  if (a.capacity != b.capacity) return a.capacity > b.capacity;
  return a.p < b.p;
}

std::vector<double> log_space(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  const double ratio = std::log(hi / lo);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo * std::exp(ratio * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  v.front() = lo;
  v.back() = hi;
  return v;
}

class DualSolver {
 public:
  DualSolver(const Instance& inst, const DualConfig& cfg, AllocationResult& res)
      : inst_(inst), cfg_(cfg), res_(res), weight_(inst.k_count(), 1.0) {
    if (cfg.weighting == DualWeighting::gradient) {
      const auto& t = inst.tables;
      for (std::size_t k = 0; k < inst.k_count(); ++k) {
        double a = 0.0;
        for (std::size_t l = 0; l < inst.scenario.pu_count(); ++l) {
          a += inst.channels.gain_sp(l, k) * t.sp_factor(l, k);
        }
        weight_[k] = a;
      }
    }
  }

  GridPoint evaluate(double mu, double lambda) {
    const std::size_t k_count = inst_.k_count();
    const auto& pu_j = inst_.tables.pu_interference_total;
    GridPoint g{mu, lambda, PowerVector(k_count), 0.0, false, false};

    for (std::size_t k = 0; k < k_count; ++k) {
      g.p[k] = waterfill_power(inst_, mu, lambda, k, pu_j[k], weight_[k]);
    }
    res_.waterfill_evals += k_count;

    // Jacobi sweeps: SU-SU interference from the previous iterate.
    PowerVector next(k_count);
    for (std::size_t it = 0; it < cfg_.inner_fixed_point_iters; ++it) {
      double change = 0.0;
      double scale = 0.0;
      for (std::size_t k = 0; k < k_count; ++k) {
        const double in_k = su_to_su_interference(g.p, inst_.channels, inst_.tables, k);
        next[k] = waterfill_power(inst_, mu, lambda, k, pu_j[k] + in_k, weight_[k]);
        change = std::max(change, std::abs(next[k] - g.p[k]));
        scale = std::max(scale, std::abs(next[k]));
      }
      res_.waterfill_evals += k_count;
      std::swap(g.p, next);
      if (change <= cfg_.inner_tol * std::max(scale, 1e-300)) {
        g.converged = true;
        break;
      }
    }

    g.feasible = check_feasible(inst_, g.p, 0.0).feasible;
    if (g.feasible) {
      ++res_.evals;
      g.capacity = total_capacity(inst_, g.p);
    }
    return g;
  }

  // Bisects in log space over t between an infeasible `lo` and the feasible
  // `hi`, where t maps to a multiplier pair; keeps any feasible improvement.
  template <class Pair>
  void bisect(GridPoint& best, double lo, double hi, Pair pair) {
    for (std::size_t i = 0; i < cfg_.refine_iters; ++i) {
      const double mid = std::sqrt(lo * hi);
      const auto [mu, lambda] = pair(mid);
      auto g = evaluate(mu, lambda);
      if (g.feasible) {
        hi = mid;
        if (better(g, best)) best = std::move(g);
      } else {
        lo = mid;
      }
    }
  }

  // Coordinate refinement toward a smaller multiplier on one axis.
  void refine(GridPoint& best, double lo_value, bool along_mu) {
    const double mu = best.mu;
    const double lambda = best.lambda;
    const auto pair = [&](double v) {
      return along_mu ? std::pair{v, lambda} : std::pair{mu, v};
    };
    const auto [lo_mu, lo_lambda] = pair(lo_value);
    if (evaluate(lo_mu, lo_lambda).feasible) return;
    bisect(best, lo_value, along_mu ? mu : lambda, pair);
  }

 private:
  const Instance& inst_;
  const DualConfig& cfg_;
  AllocationResult& res_;
  std::vector<double> weight_;
};

}  // namespace

AllocationResult solve_dual(const Instance& inst, const DualConfig& cfg) {
  validate(cfg);
  AllocationResult res;
  res.method = "dual";
  DualSolver solver(inst, cfg, res);

  const auto mus = log_space(cfg.mu_min, cfg.mu_max, cfg.grid_points);
  const auto lambdas = log_space(cfg.lambda_min, cfg.lambda_max, cfg.grid_points);

  GridPoint best;
  std::size_t best_i = 0;
  std::size_t best_j = 0;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      auto g = solver.evaluate(mus[i], lambdas[j]);
      if (better(g, best)) {
        best = std::move(g);
        best_i = i;
        best_j = j;
      }
    }
  }
  if (best.feasible) {
    if (best_i > 0) solver.refine(best, mus[best_i - 1], true);
    if (best_j > 0) solver.refine(best, lambdas[best_j - 1], false);
  } else {
    // A budget far below the water level the grid can reach: walk the
    // diagonal past the range a decade at a time, then bisect back.
    double mu = cfg.mu_max;
    double lambda = cfg.lambda_max;
    for (int decade = 0; decade < kMaxExtraDecades && !best.feasible; ++decade) {
      mu *= 10.0;
      lambda *= 10.0;
      best = solver.evaluate(mu, lambda);
    }
    if (!best.feasible) {
      throw NumericalError("solve_dual: no feasible multiplier pair found");
    }
    const double ratio = cfg.lambda_max / cfg.mu_max;
    solver.bisect(best, mu / 10.0, mu, [&](double v) { return std::pair{v, v * ratio}; });
    solver.refine(best, cfg.mu_min, true);
    solver.refine(best, cfg.lambda_min, false);
  }

  const auto& sc = inst.scenario;
  DualInfo info{best.mu, best.lambda, best.mu, best.lambda, false, false, best.converged};
  const auto report = check_feasible(inst, best.p, 0.0);
  info.power_tight = report.total_power >= sc.p_max * (1.0 - kTightTol);
  for (std::size_t l = 0; l < sc.pu_count(); ++l) {
    if (report.per_pu_interference[l] >= sc.pus[l].interference_cap * (1.0 - kTightTol)) {
      info.interference_tight = true;
    }
  }
  // A slack constraint carries a zero multiplier. Under literal weighting
  // only mu + lambda reaches the water level, so a lone binding constraint
  // takes the whole price.
  const double price = best.mu + best.lambda;
  const bool literal = cfg.weighting == DualWeighting::literal;
  if (!info.power_tight) {
    info.mu = 0.0;
    if (literal && info.interference_tight) info.lambda = price;
  }
  if (!info.interference_tight) {
    info.lambda = 0.0;
    if (literal && info.power_tight) info.mu = price;
  }

  res.powers = std::move(best.p);
  res.capacity = best.capacity;
  res.feasibility = check_feasible(inst, res.powers, kReportTol);
  res.converged = best.converged;
  res.dual = info;
  return res;
}

AllocationResult brute_force(const Instance& inst, double resolution) {
  const std::size_t k_count = inst.k_count();
  if (k_count > kBruteForceMaxK) {
    throw InvalidArgument("brute_force: K = " + std::to_string(k_count) +
                          " exceeds the limit of " + std::to_string(kBruteForceMaxK));
  }
  if (!(resolution > 0.0)) throw InvalidArgument("brute_force: resolution must be > 0");
  const auto& sc = inst.scenario;
  const auto steps = static_cast<std::size_t>(std::floor(sc.p_max / resolution + 1e-9));

  AllocationResult res;
  res.method = "brute";
  PowerVector p(k_count);
  PowerVector best(k_count);
  double best_cap = -1.0;

  // Depth-first in lexicographic order; a strict improvement is required to
  // replace the incumbent, which realises the smallest-vector tie-break. The
  // integer budget enforces the power constraint, so only PU caps are checked.
  auto caps_ok = [&] {
    const auto interference = per_pu_interference(inst, p);
    for (std::size_t l = 0; l < interference.size(); ++l) {
      if (interference[l] > sc.pus[l].interference_cap) return false;
    }
    return true;
  };
  auto visit = [&](auto&& self, std::size_t k, std::size_t remaining) -> void {
    if (k == k_count) {
      if (!caps_ok()) return;
      ++res.evals;
      const double c = total_capacity(inst, p);
      if (c > best_cap) {
        best_cap = c;
        best = p;
      }
      return;
    }
    for (std::size_t i = 0; i <= remaining; ++i) {
      p[k] = static_cast<double>(i) * resolution;
      self(self, k + 1, remaining - i);
    }
  };
  visit(visit, 0, steps);

  res.powers = best;
  res.capacity = best_cap;
  res.feasibility = check_feasible(inst, best, kReportTol);
  res.converged = true;
  return res;
}

}  // namespace crpa
