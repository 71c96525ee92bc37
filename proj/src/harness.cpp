#include "crpa/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "crpa/config.hpp"
#include "crpa/errors.hpp"

namespace crpa {

const char* artifact_version() { return CRPA_VERSION; }

Scenario make_scenario(const ScenarioTemplate& t) {
  if (t.pu_count > t.k_count) {
    throw InvalidArgument("scenario.pu_count must not exceed scenario.k_count");
  }
  Scenario s;
  s.grid = build_grid(t.total_bw, t.k_count, t.fft_size, t.base_freq);
  for (std::size_t l = 0; l < t.pu_count; ++l) {
    s.pus.push_back(pu_on_subcarrier(s.grid, l, t.pu_power, t.interference_cap));
  }
  s.su_count = t.su_count;
  s.noise_var = t.noise_var;
  s.p_max = t.p_max;
  s.su_assignment = round_robin_assignment(t.k_count, t.su_count);
  validate(s);
  return s;
}

Scenario default_scenario() { return make_scenario(ScenarioTemplate{}); }

double dbw_to_watts(double dbw) { return std::pow(10.0, dbw / 10.0); }

const char* to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::p_max_dbw: return "p_max_dbw";
    case SweepAxis::pu_count: return "pu_count";
    case SweepAxis::su_count: return "su_count";
    case SweepAxis::k_count: return "k_count";
    case SweepAxis::trace: return "trace";
    case SweepAxis::snapshot: return "snapshot";
  }
  return "?";
}

const char* to_string(Method method) {
  switch (method) {
    case Method::sa: return "sa";
    case Method::dual: return "dual";
    case Method::brute: return "brute";
  }
  return "?";
}

std::optional<SweepAxis> parse_axis(const std::string& s) {
  for (auto a : {SweepAxis::p_max_dbw, SweepAxis::pu_count, SweepAxis::su_count,
                 SweepAxis::k_count, SweepAxis::trace, SweepAxis::snapshot}) {
    if (s == to_string(a)) return a;
  }
  return std::nullopt;
}

std::optional<Method> parse_method(const std::string& s) {
  for (auto m : {Method::sa, Method::dual, Method::brute}) {
    if (s == to_string(m)) return m;
  }
  return std::nullopt;
}

ExperimentSpec default_experiment() {
  ExperimentSpec spec;
  for (int i = 0; i <= 14; ++i) spec.values.push_back(-20.0 + 2.5 * i);
  return spec;
}

void validate(const ExperimentSpec& spec) {
  if (spec.values.empty()) throw InvalidArgument("experiment.values must not be empty");
  if (spec.trials == 0) throw InvalidArgument("experiment.trials must be >= 1");
  if (spec.methods.empty()) throw InvalidArgument("experiment.methods must not be empty");
  if (!(spec.brute_resolution_fraction > 0.0 && spec.brute_resolution_fraction <= 1.0)) {
    throw InvalidArgument("brute.resolution_fraction must lie in (0, 1]");
  }
  validate(spec.sa);
  validate(spec.dual);
  (void)make_scenario(spec.scenario);
  for (double v : spec.values) {
    if (!std::isfinite(v)) throw InvalidArgument("experiment.values must be finite");
    switch (spec.axis) {
      case SweepAxis::pu_count:
      case SweepAxis::su_count:
      case SweepAxis::k_count:
        if (v < 0.0 || v != std::floor(v)) {
          throw InvalidArgument("experiment.values must be non-negative integers for axis " +
                                std::string(to_string(spec.axis)));
        }
        break;
      default:
        break;
    }
  }
  // Lay out every point once so bad combinations fail before any solving.
  for (double v : spec.values) (void)scenario_at(spec, v);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t master_seed, std::size_t trial) {
  return splitmix64(splitmix64(master_seed) ^ static_cast<std::uint64_t>(trial));
}

Scenario scenario_at(const ExperimentSpec& spec, double v) {
  ScenarioTemplate t = spec.scenario;
  switch (spec.axis) {
    case SweepAxis::p_max_dbw:
    case SweepAxis::trace:
    case SweepAxis::snapshot:
      t.p_max = dbw_to_watts(v);
      break;
    case SweepAxis::pu_count:
      t.pu_count = static_cast<std::size_t>(v);
      break;
    case SweepAxis::su_count:
      t.su_count = static_cast<std::size_t>(v);
      break;
    case SweepAxis::k_count: {
      // Subcarrier width and FFT-bin alignment stay fixed.
      const double bs = t.total_bw / static_cast<double>(t.k_count);
      t.k_count = static_cast<std::size_t>(v);
      t.total_bw = bs * v;
      t.fft_size = t.k_count;
      break;
    }
  }
  return make_scenario(t);
}

AllocationResult run_method(const Instance& inst, Method method, const ExperimentSpec& spec,
                            std::uint64_t seed) {
  switch (method) {
    case Method::sa: {
      SaConfig cfg = spec.sa;
      cfg.seed = splitmix64(spec.sa.seed ^ splitmix64(seed));
      return anneal(inst, cfg);
    }
    case Method::dual:
      return solve_dual(inst, spec.dual);
    case Method::brute:
      return brute_force(inst, spec.brute_resolution_fraction * inst.scenario.p_max);
  }
  throw InvalidArgument("unknown method");
}

bool ExperimentResult::all_failed() const {
  return std::none_of(rows.begin(), rows.end(), [](const TrialRow& r) { return r.ok; });
}

ExperimentResult run_experiment(const ExperimentSpec& spec, std::size_t jobs) {
  validate(spec);
  const std::size_t n_values = spec.values.size();
  const std::size_t n_methods = spec.methods.size();

  std::vector<Scenario> scenarios;
  std::vector<SpectralGeometry> geometry;
  for (double v : spec.values) {
    scenarios.push_back(scenario_at(spec, v));
    geometry.push_back(compute_geometry(scenarios.back()));
  }

  ExperimentResult result;
  result.rows.resize(n_values * spec.trials * n_methods);

  auto run_cell = [&](std::size_t cell) {
    const std::size_t vi = cell / spec.trials;
    const std::size_t trial = cell % spec.trials;
    const std::uint64_t seed = trial_seed(spec.master_seed, trial);
    std::optional<Instance> inst;
    std::string setup_error;
    try {
      inst = make_instance(scenarios[vi], sample_channels(scenarios[vi], seed), geometry[vi]);
    } catch (const std::exception& e) {
      setup_error = e.what();
    }
    for (std::size_t mi = 0; mi < n_methods; ++mi) {
      TrialRow& row = result.rows[cell * n_methods + mi];
      row.axis_value = spec.values[vi];
      row.trial = trial;
      row.seed = seed;
      row.method = spec.methods[mi];
      if (!inst) {
        row.error = setup_error;
        continue;
      }
      const auto start = std::chrono::steady_clock::now();
      try {
        auto r = run_method(*inst, row.method, spec, seed);
        row.ok = true;
        row.capacity = r.capacity;
        row.evals = r.evals;
        row.waterfill_evals = r.waterfill_evals;
        row.feasible = r.feasibility.feasible;
        row.powers = std::move(r.powers);
        if (spec.axis == SweepAxis::trace) row.trace = std::move(r.trace);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      row.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    }
  };

  const std::size_t cells = n_values * spec.trials;
  const std::size_t workers = std::clamp<std::size_t>(jobs, 1, cells);
  if (workers == 1) {
    for (std::size_t c = 0; c < cells; ++c) run_cell(c);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next++; c < cells; c = next++) run_cell(c);
      });
    }
  }

  result.points = summarize(result.rows, spec);
  return result;
}

std::vector<PointSummary> summarize(const std::vector<TrialRow>& rows,
                                    const ExperimentSpec& spec) {
  std::vector<PointSummary> out;
  for (double v : spec.values) {
    for (Method m : spec.methods) {
      PointSummary s{v, m};
      std::vector<double> caps;
      double evals = 0.0;
      double wf = 0.0;
      for (const auto& r : rows) {
        if (r.axis_value != v || r.method != m) continue;
        if (!r.ok) {
          ++s.trials_failed;
          continue;
        }
        caps.push_back(r.capacity);
        evals += static_cast<double>(r.evals);
        wf += static_cast<double>(r.waterfill_evals);
        if (r.feasible) ++s.feasible;
      }
      s.trials_ok = caps.size();
      if (!caps.empty()) {
        const double n = static_cast<double>(caps.size());
        double sum = 0.0;
        for (double c : caps) sum += c;
        s.mean_capacity = sum / n;
        double ss = 0.0;
        for (double c : caps) ss += (c - s.mean_capacity) * (c - s.mean_capacity);
        s.std_capacity = caps.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        s.mean_evals = evals / n;
        s.mean_waterfill_evals = wf / n;
      }
      out.push_back(s);
    }
  }
  return out;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void write_manifest(std::ostream& os, const ExperimentSpec& spec, const char* table) {
  os << "# crpa " << table << '\n';
  os << "# schema_version=" << kCsvSchemaVersion << '\n';
  os << "# artifact_version=" << artifact_version() << '\n';
  os << "# config_hash=fnv1a64:" << fnv1a_hex(dump_config(spec)) << '\n';
  os << "# axis=" << to_string(spec.axis) << '\n';
  os << "# master_seed=" << spec.master_seed << '\n';
  os << "# seeds=";
  for (std::size_t t = 0; t < spec.trials; ++t) {
    os << (t ? ";" : "") << trial_seed(spec.master_seed, t);
  }
  os << '\n';
}

// Row error messages may contain commas or quotes.
std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

void write_experiment_csv(std::ostream& os, const ExperimentSpec& spec,
                          const ExperimentResult& result) {
  const auto old_precision = os.precision(17);
  write_manifest(os, spec, "experiment");
  const char* axis = to_string(spec.axis);
  if (spec.axis == SweepAxis::trace) {
    os << "axis,value,trial,method,t,temperature,energy,capacity,accepted,best_capacity\n";
    for (const auto& r : result.rows) {
      for (const auto& t : r.trace) {
        os << axis << ',' << r.axis_value << ',' << r.trial << ',' << to_string(r.method) << ','
           << t.t << ',' << t.temperature << ',' << t.energy << ',' << t.capacity << ','
           << (t.accepted ? 1 : 0) << ',' << t.best_capacity << '\n';
      }
    }
  } else if (spec.axis == SweepAxis::snapshot) {
    os << "axis,value,method,subcarrier,trials,mean_power,std_power\n";
    for (double v : spec.values) {
      for (Method m : spec.methods) {
        std::vector<const PowerVector*> ps;
        for (const auto& r : result.rows) {
          if (r.ok && r.axis_value == v && r.method == m) ps.push_back(&r.powers);
        }
        if (ps.empty()) continue;
        const std::size_t k_count = ps.front()->size();
        for (std::size_t k = 0; k < k_count; ++k) {
          const double n = static_cast<double>(ps.size());
          double mean = 0.0;
          for (const auto* p : ps) mean += (*p)[k];
          mean /= n;
          double ss = 0.0;
          for (const auto* p : ps) ss += ((*p)[k] - mean) * ((*p)[k] - mean);
          const double sd = ps.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
          os << axis << ',' << v << ',' << to_string(m) << ',' << k + 1 << ',' << ps.size()
             << ',' << mean << ',' << sd << '\n';
        }
      }
    }
  } else {
    os << "axis,value,method,trials,failed,feasible,mean_capacity,std_capacity,mean_evals,"
          "mean_waterfill_evals\n";
    for (const auto& p : result.points) {
      os << axis << ',' << p.axis_value << ',' << to_string(p.method) << ',' << p.trials_ok
         << ',' << p.trials_failed << ',' << p.feasible << ',' << p.mean_capacity << ','
         << p.std_capacity << ',' << p.mean_evals << ',' << p.mean_waterfill_evals << '\n';
    }
  }
  os.precision(old_precision);
}

void write_trials_csv(std::ostream& os, const ExperimentSpec& spec,
                      const ExperimentResult& result) {
  const auto old_precision = os.precision(17);
  write_manifest(os, spec, "trials");
  os << "axis,value,trial,seed,method,ok,capacity,evals,waterfill_evals,feasible,error\n";
  for (const auto& r : result.rows) {
    os << to_string(spec.axis) << ',' << r.axis_value << ',' << r.trial << ',' << r.seed << ','
       << to_string(r.method) << ',' << (r.ok ? 1 : 0) << ',' << r.capacity << ',' << r.evals
       << ',' << r.waterfill_evals << ',' << (r.feasible ? 1 : 0) << ',' << csv_quote(r.error)
       << '\n';
  }
  os.precision(old_precision);
}

void write_timing_csv(std::ostream& os, const ExperimentSpec& spec,
                      const ExperimentResult& result) {
  const auto old_precision = os.precision(6);
  os << "axis,value,trial,method,wall_ms\n";
  for (const auto& r : result.rows) {
    os << to_string(spec.axis) << ',' << r.axis_value << ',' << r.trial << ','
       << to_string(r.method) << ',' << r.wall_ms << '\n';
  }
  os.precision(old_precision);
}

}  // namespace crpa
