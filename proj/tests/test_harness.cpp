#include <cmath>
#include <sstream>
#include <string>

#include "crpa/config.hpp"
#include "crpa/harness.hpp"
#include "doctest.h"

using namespace crpa;

namespace {

ExperimentSpec tiny_spec() {
  ExperimentSpec spec = default_experiment();
  spec.values = {-10.0, 5.0};
  spec.trials = 3;
  spec.sa.max_iters = 400;
  spec.sa.sweeps_per_temp = 4;
  spec.dual.grid_points = 6;
  spec.dual.refine_iters = 4;
  return spec;
}

std::string experiment_csv(const ExperimentSpec& spec, std::size_t jobs) {
  std::ostringstream os;
  write_experiment_csv(os, spec, run_experiment(spec, jobs));
  return os.str();
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("dBW conversion") {
    CHECK(dbw_to_watts(0.0) == 1.0);
    CHECK(dbw_to_watts(10.0) == doctest::Approx(10.0));
    CHECK(dbw_to_watts(-20.0) == doctest::Approx(0.01));
    CHECK(dbw_to_watts(5.0) == doctest::Approx(3.1622776601683795));
  }

  TEST_CASE("default scenario layout") {
    const auto s = default_scenario();
    CHECK(s.k_count() == 32);
    CHECK(s.pu_count() == 2);
    CHECK(s.su_count == 8);
    CHECK(s.grid.subcarrier_bw == doctest::Approx(0.4e6));
    CHECK(s.pus[0].band_center == s.grid.center_freq[0]);
    CHECK(s.pus[1].band_center == s.grid.center_freq[1]);
    CHECK(s.pus[0].interference_cap == 1e-3);
    CHECK(s.pus[1].tx_power == 0.01);
    CHECK(s.noise_var == 1e-6);
  }

  TEST_CASE("default experiment sweeps -20..15 dBW") {
    const auto spec = default_experiment();
    REQUIRE(spec.values.size() == 15);
    CHECK(spec.values.front() == -20.0);
    CHECK(spec.values.back() == 15.0);
    CHECK(spec.trials == 10);
  }

  TEST_CASE("axis layouts") {
    auto spec = default_experiment();
    spec.axis = SweepAxis::pu_count;
    CHECK(scenario_at(spec, 4).pu_count() == 4);
    spec.axis = SweepAxis::su_count;
    CHECK(scenario_at(spec, 16).su_count == 16);
    spec.axis = SweepAxis::k_count;
    const auto s = scenario_at(spec, 8);
    CHECK(s.k_count() == 8);
    CHECK(s.grid.fft_size == 8);
    CHECK(s.grid.subcarrier_bw == doctest::Approx(0.4e6));
    spec.axis = SweepAxis::p_max_dbw;
    CHECK(scenario_at(spec, 10).p_max == doctest::Approx(10.0));
  }

  TEST_CASE("trial seeds are distinct and independent of the axis") {
    CHECK(trial_seed(2016, 0) != trial_seed(2016, 1));
    CHECK(trial_seed(2016, 0) != trial_seed(2017, 0));
    CHECK(trial_seed(2016, 3) == trial_seed(2016, 3));
  }

  TEST_CASE("sweep output is identical across runs and worker counts") {
    const auto spec = tiny_spec();
    const auto a = experiment_csv(spec, 1);
    CHECK(a == experiment_csv(spec, 1));
    CHECK(a == experiment_csv(spec, 3));
    CHECK(a.find("# schema_version=1\n") != std::string::npos);
    CHECK(a.find("# config_hash=fnv1a64:") != std::string::npos);
    CHECK(a.find("axis,value,method,trials,failed,feasible,mean_capacity") != std::string::npos);
  }

  TEST_CASE("summary mean is the arithmetic mean of the trials") {
    const auto spec = tiny_spec();
    const auto result = run_experiment(spec, 1);
    REQUIRE(result.points.size() == 4);
    for (const auto& p : result.points) {
      double sum = 0.0;
      double sq = 0.0;
      std::size_t n = 0;
      for (const auto& r : result.rows) {
        if (r.axis_value == p.axis_value && r.method == p.method && r.ok) {
          sum += r.capacity;
          ++n;
        }
      }
      REQUIRE(n == 3);
      const double mean = sum / 3.0;
      for (const auto& r : result.rows) {
        if (r.axis_value == p.axis_value && r.method == p.method) {
          sq += (r.capacity - mean) * (r.capacity - mean);
        }
      }
      CHECK(p.mean_capacity == doctest::Approx(mean).epsilon(1e-15));
      CHECK(p.std_capacity == doctest::Approx(std::sqrt(sq / 2.0)).epsilon(1e-12));
      CHECK(p.trials_ok == 3);
      CHECK(p.trials_failed == 0);
      CHECK(p.feasible == 3);
    }
  }

  TEST_CASE("rows share channel seeds across axis values") {
    const auto result = run_experiment(tiny_spec(), 1);
    CHECK(result.rows[0].seed == result.rows[6].seed);
    CHECK(result.rows[0].axis_value != result.rows[6].axis_value);
  }

  TEST_CASE("trace and snapshot tables") {
    auto spec = tiny_spec();
    spec.axis = SweepAxis::trace;
    spec.values = {5.0};
    spec.trials = 1;
    spec.methods = {Method::sa};
    const auto trace = experiment_csv(spec, 1);
    CHECK(trace.find("axis,value,trial,method,t,temperature,energy,capacity,accepted,"
                     "best_capacity\n") != std::string::npos);
    CHECK(trace.find("\ntrace,5,0,sa,0,100,") != std::string::npos);

    spec.axis = SweepAxis::snapshot;
    spec.trials = 2;
    const auto snap = experiment_csv(spec, 1);
    CHECK(snap.find("axis,value,method,subcarrier,trials,mean_power,std_power\n") !=
          std::string::npos);
    CHECK(snap.find("\nsnapshot,5,sa,32,2,") != std::string::npos);
  }

  TEST_CASE("failures are recorded per row and do not stop the sweep") {
    auto spec = tiny_spec();
    spec.methods = {Method::brute, Method::dual};
    const auto result = run_experiment(spec, 2);
    CHECK_FALSE(result.all_failed());
    for (const auto& r : result.rows) {
      if (r.method == Method::brute) {
        CHECK_FALSE(r.ok);
        CHECK(r.error.find("exceeds the limit") != std::string::npos);
      } else {
        CHECK(r.ok);
      }
    }
    std::ostringstream os;
    write_trials_csv(os, spec, result);
    CHECK(os.str().find(",brute,0,0,0,0,0,brute_force: K = 32 exceeds") != std::string::npos);
  }

  TEST_CASE("FNV-1a reference values") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  }

  TEST_CASE("experiment validation") {
    auto spec = default_experiment();
    spec.trials = 0;
    CHECK_THROWS_WITH_AS(validate(spec), doctest::Contains("experiment.trials"), InvalidArgument);
    spec = default_experiment();
    spec.axis = SweepAxis::pu_count;
    spec.values = {40};
    CHECK_THROWS_WITH_AS(validate(spec), doctest::Contains("pu_count"), InvalidArgument);
    spec = default_experiment();
    spec.scenario.p_max = -1.0;
    CHECK_THROWS_WITH_AS(validate(spec), doctest::Contains("scenario.p_max"), InvalidArgument);
  }
}

TEST_SUITE("config") {
  TEST_CASE("empty input yields the defaults") {
    CHECK(dump_config(parse_config("")) == dump_config(default_experiment()));
    CHECK(dump_config(parse_config("  \n\t")) == dump_config(default_experiment()));
  }

  TEST_CASE("dump and load round trip is idempotent") {
    const std::string text = R"({"scenario": {"p_max": 2.5, "su_count": 4},
                                 "experiment": {"axis": "su_count", "trials": 3},
                                 "sa": {"seed": 9}, "dual": {"weighting": "gradient"}})";
    const auto once = dump_config(parse_config(text));
    const auto twice = dump_config(parse_config(once));
    CHECK(once == twice);
    const auto spec = parse_config(once);
    CHECK(spec.scenario.p_max == 2.5);
    CHECK(spec.axis == SweepAxis::su_count);
    CHECK(spec.values == std::vector<double>{4, 8, 16});
    CHECK(spec.sa.seed == 9);
    CHECK(spec.dual.weighting == DualWeighting::gradient);
  }

  TEST_CASE("negative budget names scenario.p_max") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"scenario": {"p_max": -1}})", "bad.json"),
                         doctest::Contains("scenario.p_max"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"scenario": {"p_max": -1}})", "bad.json"),
                         doctest::Contains("bad.json"), ConfigError);
  }

  TEST_CASE("syntax errors carry line and column") {
    CHECK_THROWS_WITH_AS(parse_config("{\n  \"sa\": {\n    \"seed\": ,\n  }\n}"),
                         doctest::Contains("line 3, column"), ConfigError);
  }

  TEST_CASE("unknown keys are rejected") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"sa": {"sed": 1}})"), doctest::Contains("sa.sed"),
                         ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"extra": {}})"), doctest::Contains("extra"),
                         ConfigError);
  }

  TEST_CASE("type errors name the key") {
    CHECK_THROWS_WITH_AS(parse_config(R"({"experiment": {"trials": -2}})"),
                         doctest::Contains("experiment.trials"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"experiment": {"methods": ["sa", "ga"]}})"),
                         doctest::Contains("experiment.methods"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"dual": {"weighting": "other"}})"),
                         doctest::Contains("dual.weighting"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"scenario": {"noise_var": "x"}})"),
                         doctest::Contains("scenario.noise_var"), ConfigError);
  }

  TEST_CASE("missing file is a config error") {
    CHECK_THROWS_AS(load_config("/nonexistent/crpa.json"), ConfigError);
  }
}
