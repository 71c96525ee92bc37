#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "crpa/dual_baseline.hpp"
#include "crpa/harness.hpp"
#include "crpa/sa_optimizer.hpp"
#include "doctest.h"

using namespace crpa;

namespace {

Instance single_subcarrier(double p_max) {
  Scenario s;
  s.grid = build_grid(1.0, 1, 1, 0.0);
  s.su_count = 1;
  s.noise_var = 1.0;
  s.p_max = p_max;
  s.su_assignment = {0};
  ChannelSet c;
  c.gain_sp = Matrix(0, 1);
  c.gain_ps = Matrix(0, 1);
  c.gain_ss_direct = {1.0};
  c.gain_ss_cross = Matrix(1, 1);
  return make_instance(s, c);
}

Instance desk_instance(std::uint64_t seed) {
  ScenarioTemplate t;
  t.total_bw = 1.6e6;
  t.k_count = 4;
  t.fft_size = 4;
  t.pu_count = 1;
  t.su_count = 2;
  return make_instance(make_scenario(t), seed);
}

}  // namespace

TEST_SUITE("sa_optimizer") {
  TEST_CASE("Metropolis acceptance") {
    CHECK(accept(-1.0, 1e-9, 0.999999));
    CHECK(accept(-1.0, 50.0, 0.5));
    CHECK(accept(0.0, 3.0, 0.999));
    const double inv_e = std::exp(-1.0);
    CHECK(accept(2.0, 2.0, inv_e));
    CHECK(accept(2.0, 2.0, 0.3));
    CHECK_FALSE(accept(2.0, 2.0, std::nextafter(inv_e, 1.0)));
    CHECK_FALSE(accept(2.0, 2.0, 0.37));
  }

  TEST_CASE("halving the temperature never raises acceptance") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const double delta = 5.0 * u(rng) + 1e-6;
      const double t = 10.0 * u(rng) + 1e-6;
      const double r = u(rng);
      if (accept(delta, t / 2.0, r)) CHECK(accept(delta, t, r));
    }
  }

  TEST_CASE("zero perturbation scale leaves p unchanged") {
    SaConfig cfg;
    cfg.perturb_scale = 0.0;
    std::mt19937_64 rng(1);
    PowerVector p(std::vector<double>{0.1, 0.0, 0.3});
    CHECK(perturb(p, 50.0, 1.0, cfg, rng) == p);
  }

  TEST_CASE("perturbation is deterministic given the generator state") {
    SaConfig cfg;
    std::mt19937_64 a(99);
    std::mt19937_64 b(99);
    PowerVector p(8, 0.2);
    const auto x = perturb(p, 10.0, 1.0, cfg, a);
    const auto y = perturb(p, 10.0, 1.0, cfg, b);
    CHECK(x == y);
    CHECK_FALSE(x == p);
    for (double v : x) CHECK(v >= 0.0);
  }

  TEST_CASE("perturbation has zero mean displacement") {
    SaConfig cfg;
    cfg.perturb_scale = 0.01;
    const double sigma = cfg.perturb_scale * 1.0 * (1.0 / cfg.initial_temp);
    std::mt19937_64 rng(2024);
    // Far enough from zero that the clamp never triggers.
    PowerVector p(std::vector<double>{1.0, 2.0});
    const int n = 10000;
    double sum0 = 0.0;
    double sum1 = 0.0;
    for (int i = 0; i < n; ++i) {
      const auto q = perturb(p, 1.0, 1.0, cfg, rng);
      sum0 += q[0] - p[0];
      sum1 += q[1] - p[1];
    }
    const double se = sigma / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(sum0 / n) <= 3.0 * se);
    CHECK(std::abs(sum1 / n) <= 3.0 * se);
  }

  TEST_CASE("projection examples") {
    auto s = default_scenario();
    auto c = sample_channels(s, 3);
    c.gain_sp = Matrix(2, 32, 0.0);
    const auto free = make_instance(s, c);

    PowerVector ok(32, s.p_max / 64.0);
    CHECK(project_feasible(free, ok) == ok);

    PowerVector twice(32, 2.0 * s.p_max / 32.0);
    const auto half = project_feasible(free, twice);
    for (std::size_t k = 0; k < 32; ++k) CHECK(half[k] == doctest::Approx(twice[k] / 2.0));
    CHECK(half.total() <= s.p_max);

    // PU 0 overloaded tenfold through a single subcarrier gain.
    c.gain_sp(0, 5) = 1.0;
    const auto capped = make_instance(s, c);
    PowerVector p(32, 0.0);
    p[5] = 10.0 * 1e-3 / capped.tables.sp_factor(0, 5);
    p[7] = 1e-3;
    const auto q = project_feasible(capped, p);
    CHECK(q[5] == doctest::Approx(p[5] / 10.0).epsilon(1e-12));
    CHECK(q[7] == doctest::Approx(p[7] / 10.0).epsilon(1e-12));
    CHECK(check_feasible(capped, q, 0.0).feasible);
  }

  TEST_CASE("projection lands in the feasible set at tolerance 0") {
    const auto inst = make_instance(default_scenario(), 8);
    std::mt19937_64 rng(8);
    std::exponential_distribution<double> e(1.0);
    for (int i = 0; i < 200; ++i) {
      PowerVector p(32);
      for (auto& x : p) x = e(rng);
      const auto q = project_feasible(inst, p);
      CHECK(check_feasible(inst, q, 0.0).feasible);
      // Direction is preserved.
      const double s = q[0] / p[0];
      for (std::size_t k = 1; k < 32; ++k) CHECK(q[k] == doctest::Approx(s * p[k]).epsilon(1e-12));
    }
  }

  TEST_CASE("single subcarrier converges to the budget") {
    for (double p_max : {0.5, 3.0}) {
      SaConfig cfg;
      cfg.seed = 3;
      const auto r = anneal(single_subcarrier(p_max), cfg);
      CHECK(std::abs(r.powers[0] - p_max) / p_max <= 1e-3);
      CHECK(r.feasibility.feasible);
    }
  }

  TEST_CASE("desk instance within 2% of the brute-force grid optimum") {
    for (std::uint64_t seed : {1000u, 1003u}) {
      const auto inst = desk_instance(seed);
      const auto brute = brute_force(inst, inst.scenario.p_max / 50.0);
      SaConfig cfg;
      cfg.seed = seed;
      const auto r = anneal(inst, cfg);
      CHECK(r.capacity >= 0.98 * brute.capacity);
    }
  }

  TEST_CASE("default scenario at 5 dBW: feasible result with a consistent trace") {
    const auto inst = make_instance(default_scenario(), 2016);
    SaConfig cfg;
    const auto r = anneal(inst, cfg);
    CHECK(r.method == "sa");
    CHECK(r.feasibility.feasible);
    CHECK(check_feasible(inst, r.powers, 0.0).feasible);
    CHECK(std::abs(r.capacity - total_capacity(inst, r.powers)) <= 1e-12);
    REQUIRE_FALSE(r.trace.empty());
    CHECK(r.trace.size() <= cfg.max_iters);
    CHECK(r.evals <= cfg.max_iters + 1);
    CHECK(r.evals == r.trace.size() + 1);
    double best = r.trace.front().best_capacity;
    for (std::size_t i = 0; i < r.trace.size(); ++i) {
      const auto& row = r.trace[i];
      CHECK(row.t == i);
      CHECK(row.energy == -row.capacity);
      CHECK(row.best_capacity >= best);
      CHECK(row.best_capacity >= row.capacity);
      best = row.best_capacity;
      if (i > 0) CHECK(row.temperature <= r.trace[i - 1].temperature);
    }
    CHECK(r.capacity == best);
    CHECK(r.trace.front().temperature == cfg.initial_temp);
  }

  TEST_CASE("identical seeds give bit-identical results") {
    const auto inst = make_instance(default_scenario(), 21);
    SaConfig cfg;
    cfg.seed = 77;
    cfg.max_iters = 3000;
    const auto a = anneal(inst, cfg);
    const auto b = anneal(inst, cfg);
    CHECK(a.powers == b.powers);
    CHECK(a.capacity == b.capacity);
    CHECK(a.evals == b.evals);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(a.trace[i].capacity == b.trace[i].capacity);
      CHECK(a.trace[i].accepted == b.trace[i].accepted);
    }
    cfg.seed = 78;
    CHECK_FALSE(anneal(inst, cfg).powers == a.powers);
  }

  TEST_CASE("temperature steps every sweeps_per_temp candidates") {
    SaConfig cfg;
    cfg.sweeps_per_temp = 3;
    cfg.max_iters = 10;
    const auto r = anneal(make_instance(default_scenario(), 1), cfg);
    REQUIRE(r.trace.size() == 10);
    CHECK(r.trace[2].temperature == cfg.initial_temp);
    CHECK(r.trace[3].temperature == cfg.initial_temp * cfg.cooling_factor);
    CHECK(r.trace[6].temperature == cfg.initial_temp * cfg.cooling_factor * cfg.cooling_factor);
  }

  TEST_CASE("non-finite objective raises with the trace attached") {
    auto inst = make_instance(default_scenario(), 1);
    inst.channels.gain_ss_direct[4] = std::numeric_limits<double>::infinity();
    SaConfig cfg;
    try {
      (void)anneal(inst, cfg);
      FAIL("expected AnnealError");
    } catch (const AnnealError& e) {
      CHECK(std::string(e.what()).find("not finite") != std::string::npos);
      CHECK(e.trace().empty());
    }
  }

  TEST_CASE("config validation names the field") {
    SaConfig cfg;
    cfg.cooling_factor = 1.0;
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("sa.cooling_factor"), InvalidArgument);
    cfg = SaConfig{};
    cfg.epsilon = 0.0;
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("sa.epsilon"), InvalidArgument);
    cfg = SaConfig{};
    cfg.max_iters = 0;
    CHECK_THROWS_AS(validate(cfg), InvalidArgument);
    CHECK(SaConfig{}.temp_floor() == doctest::Approx(1e-4));
  }

  TEST_CASE("trace CSV") {
    std::vector<TraceRow> rows{{0, 100.0, -1.5, 1.5, true, 1.5}, {1, 95.0, -1.25, 1.25, false, 1.5}};
    std::ostringstream os;
    write_trace_csv(os, rows);
    CHECK(os.str() == "t,temperature,energy,capacity,accepted\n0,100,-1.5,1.5,1\n1,95,-1.25,1.25,0\n");
  }
}
