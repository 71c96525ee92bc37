// crpa: power allocation for OFDM cognitive-radio downlinks.
//
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
// CRPA_OUTPUT_DIR, when set, is the base directory for relative output paths.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "crpa/capacity.hpp"
#include "crpa/config.hpp"
#include "crpa/dual_baseline.hpp"
#include "crpa/harness.hpp"
#include "crpa/sa_optimizer.hpp"

namespace fs = std::filesystem;
using namespace crpa;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string method = "sa";
  std::string out;
  std::size_t jobs = 1;
};

fs::path resolve_output(const std::string& path) {
  fs::path p(path);
  if (p.is_absolute()) return p;
  if (const char* dir = std::getenv("CRPA_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
    return fs::path(dir) / p;
  }
  return p;
}

// Writes to --out when given, stdout otherwise.
void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  const auto path = resolve_output(opt.out);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

ExperimentSpec load(const Options& opt) {
  return opt.config.empty() ? default_experiment() : load_config(opt.config);
}

Instance single_instance(const ExperimentSpec& spec, const Options& opt) {
  const std::uint64_t seed = opt.seed.value_or(trial_seed(spec.master_seed, 0));
  return make_instance(make_scenario(spec.scenario), seed);
}

std::string describe(const Instance& inst, const AllocationResult& r) {
  std::ostringstream os;
  os.precision(17);
  os << "# method=" << r.method << '\n';
  os << "# capacity_bits_per_s_hz=" << r.capacity << '\n';
  os << "# capacity_bits_per_s=" << r.capacity * inst.scenario.grid.subcarrier_bw << '\n';
  os << "# feasible=" << (r.feasibility.feasible ? 1 : 0) << '\n';
  os << "# total_power_w=" << r.feasibility.total_power << " p_max_w=" << inst.scenario.p_max
     << '\n';
  for (std::size_t l = 0; l < r.feasibility.per_pu_interference.size(); ++l) {
    os << "# pu" << l + 1 << "_interference_w=" << r.feasibility.per_pu_interference[l]
       << " cap_w=" << inst.scenario.pus[l].interference_cap << '\n';
  }
  os << "# evals=" << r.evals << " waterfill_evals=" << r.waterfill_evals << '\n';
  if (r.dual) {
    os << "# mu=" << r.dual->mu << " lambda=" << r.dual->lambda
       << " grid_mu=" << r.dual->grid_mu << " grid_lambda=" << r.dual->grid_lambda
       << " fixed_point_converged=" << (r.dual->fixed_point_converged ? 1 : 0) << '\n';
  }
  os << "subcarrier,su,power_w,rate_bits_per_s_hz\n";
  for (std::size_t k = 0; k < inst.k_count(); ++k) {
    os << k + 1 << ',' << inst.scenario.su_assignment[k] + 1 << ',' << r.powers[k] << ','
       << subcarrier_rate(inst, r.powers, k) << '\n';
  }
  return os.str();
}

std::string plot_stub(const std::string& csv_name, SweepAxis axis) {
  std::ostringstream os;
  os << "#!/usr/bin/env python3\n"
        "# Plots "
     << csv_name
     << " written by `crpa sweep`.\n"
        "import sys\n"
        "import pandas as pd\n"
        "import matplotlib.pyplot as plt\n\n"
        "path = sys.argv[1] if len(sys.argv) > 1 else \""
     << csv_name
     << "\"\n"
        "df = pd.read_csv(path, comment=\"#\")\n";
  if (axis == SweepAxis::trace) {
    os << "for (v, trial), g in df.groupby([\"value\", \"trial\"]):\n"
          "    plt.plot(g[\"t\"], g[\"capacity\"], label=f\"{v} dBW, trial {trial}\")\n"
          "plt.xlabel(\"iteration\")\nplt.ylabel(\"capacity (bits/s/Hz)\")\n";
  } else if (axis == SweepAxis::snapshot) {
    os << "for (v, m), g in df.groupby([\"value\", \"method\"]):\n"
          "    plt.bar(g[\"subcarrier\"], g[\"mean_power\"], label=f\"{m} at {v} dBW\", "
          "alpha=0.6)\n"
          "plt.xlabel(\"subcarrier\")\nplt.ylabel(\"power (W)\")\n";
  } else {
    os << "for m, g in df.groupby(\"method\"):\n"
          "    plt.errorbar(g[\"value\"], g[\"mean_capacity\"], yerr=g[\"std_capacity\"], "
          "label=m, marker=\"o\")\n"
          "plt.xlabel(df[\"axis\"].iloc[0])\nplt.ylabel(\"capacity (bits/s/Hz)\")\n";
  }
  os << "plt.legend()\nplt.grid(True)\nplt.savefig(path.rsplit(\".\", 1)[0] + \".png\", "
        "dpi=150)\n";
  return os.str();
}

int cmd_solve(const Options& opt) {
  const auto spec = load(opt);
  const auto method = parse_method(opt.method);
  if (!method) throw ConfigError("--method must be one of sa, dual, brute");
  const auto inst = single_instance(spec, opt);
  const auto r = run_method(inst, *method, spec, opt.seed.value_or(spec.master_seed));
  emit(opt, describe(inst, r));
  return 0;
}

int cmd_oracle(const Options& opt) {
  const auto spec = load(opt);
  if (spec.scenario.k_count > kBruteForceMaxK) {
    throw ConfigError("oracle: scenario.k_count = " + std::to_string(spec.scenario.k_count) +
                      " exceeds the brute-force limit of " + std::to_string(kBruteForceMaxK));
  }
  const auto inst = single_instance(spec, opt);
  const auto r = run_method(inst, Method::brute, spec, 0);
  emit(opt, describe(inst, r));
  return 0;
}

int cmd_trace(const Options& opt) {
  const auto spec = load(opt);
  const auto inst = single_instance(spec, opt);
  const auto r = run_method(inst, Method::sa, spec, opt.seed.value_or(spec.master_seed));
  std::ostringstream os;
  write_trace_csv(os, r.trace);
  emit(opt, os.str());
  return 0;
}

int cmd_sweep(const Options& opt) {
  auto spec = load(opt);
  if (opt.seed) spec.master_seed = *opt.seed;
  const auto result = run_experiment(spec, opt.jobs);

  const auto main_path = resolve_output(opt.out.empty() ? spec.output : opt.out);
  if (main_path.has_parent_path()) fs::create_directories(main_path.parent_path());
  auto sibling = [&](const std::string& suffix) {
    auto p = main_path;
    p.replace_extension();
    return fs::path(p.string() + suffix);
  };
  auto write = [](const fs::path& p, auto&& fn) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + p.string());
    fn(f);
  };
  write(main_path, [&](std::ostream& os) { write_experiment_csv(os, spec, result); });
  write(sibling(".trials.csv"), [&](std::ostream& os) { write_trials_csv(os, spec, result); });
  write(sibling(".timing.csv"), [&](std::ostream& os) { write_timing_csv(os, spec, result); });
  write(sibling(".plot.py"), [&](std::ostream& os) {
    os << plot_stub(main_path.filename().string(), spec.axis);
  });

  std::size_t failed = 0;
  for (const auto& r : result.rows) failed += r.ok ? 0 : 1;
  std::cerr << "crpa sweep: wrote " << main_path.string() << " (" << result.rows.size()
            << " runs, " << failed << " failed)\n";
  return result.all_failed() ? kExitRuntime : 0;
}

int cmd_dump_config(const Options& opt) {
  emit(opt, dump_config(load(opt)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Power allocation for OFDM cognitive-radio downlinks"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opt.seed, "Channel seed (sweep: master seed)");
    sub->add_option("--out", opt.out, "Output path (default stdout; sweep: experiment.output)");
  };
  auto* solve = app.add_subcommand("solve", "Solve one scenario with one method");
  add_common(solve);
  solve->add_option("--method", opt.method, "sa, dual or brute")
      ->check(CLI::IsMember({"sa", "dual", "brute"}));
  auto* sweep = app.add_subcommand("sweep", "Run the configured experiment sweep");
  add_common(sweep);
  sweep->add_option("--jobs", opt.jobs, "Worker threads")->check(CLI::PositiveNumber);
  auto* oracle = app.add_subcommand("oracle", "Brute-force optimum (K <= 6)");
  add_common(oracle);
  auto* trace = app.add_subcommand("trace", "Simulated-annealing iteration trace as CSV");
  add_common(trace);
  auto* dump = app.add_subcommand("dump-config", "Print the effective configuration");
  add_common(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*solve) return cmd_solve(opt);
    if (*sweep) return cmd_sweep(opt);
    if (*oracle) return cmd_oracle(opt);
    if (*trace) return cmd_trace(opt);
    if (*dump) return cmd_dump_config(opt);
  } catch (const InvalidArgument& e) {
    std::cerr << "crpa: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "crpa: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
