#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "crpa/errors.hpp"
#include "crpa/model.hpp"
#include "doctest.h"

using namespace crpa;

namespace {

Scenario small_scenario(std::size_t k, std::size_t l, std::size_t m) {
  Scenario s;
  s.grid = build_grid(0.4e6 * static_cast<double>(k), k, k, 0.0);
  for (std::size_t i = 0; i < l; ++i) s.pus.push_back(pu_on_subcarrier(s.grid, i, 0.01, 1e-3));
  s.su_count = m;
  s.noise_var = 1e-6;
  s.p_max = 1.0;
  s.su_assignment = round_robin_assignment(k, m);
  return s;
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("default grid: 32 subcarriers of 0.4 MHz") {
    const auto g = build_grid(12.8e6, 32, 32, 0.0);
    CHECK(g.k_count == 32);
    CHECK(g.subcarrier_bw == doctest::Approx(0.4e6).epsilon(1e-15));
    CHECK(g.symbol_time == doctest::Approx(2.5e-6).epsilon(1e-15));
    CHECK(g.center_freq.front() == doctest::Approx(0.2e6));
    CHECK(g.center_freq.back() - g.center_freq.front() == 31 * g.subcarrier_bw);
    for (std::size_t k = 1; k < g.k_count; ++k) CHECK(g.center_freq[k] > g.center_freq[k - 1]);
  }

  TEST_CASE("degenerate single-subcarrier grid") {
    const auto g = build_grid(1.0, 1, 1, 0.0);
    REQUIRE(g.center_freq.size() == 1);
    CHECK(g.center_freq[0] == 0.5);
    CHECK(g.symbol_time == 1.0);
  }

  TEST_CASE("grid rejects bad inputs") {
    CHECK_THROWS_AS(build_grid(12.8e6, 33, 32, 0.0), InvalidArgument);
    CHECK_THROWS_AS(build_grid(0.0, 4, 4, 0.0), InvalidArgument);
    CHECK_THROWS_AS(build_grid(-1.0, 4, 4, 0.0), InvalidArgument);
    CHECK_THROWS_AS(build_grid(1e6, 0, 4, 0.0), InvalidArgument);
    CHECK_THROWS_AS(build_grid(1e6, 4, 0, 0.0), InvalidArgument);
  }

  TEST_CASE("spectral distance") {
    const auto g = build_grid(12.8e6, 32, 32, 0.0);
    const auto pu0 = pu_on_subcarrier(g, 0, 0.01, 1e-3);
    CHECK(spectral_distance(g, pu0, 0) == 0.0);
    CHECK(spectral_distance(g, pu0, 1) == doctest::Approx(0.4e6));
    CHECK(spectral_distance(g, pu0, 4) == doctest::Approx(1.6e6));
    CHECK(pu0.band_width == g.subcarrier_bw);
    CHECK_THROWS_AS(spectral_distance(g, pu0, 32), std::out_of_range);
  }

  TEST_CASE("round robin assignment") {
    const auto a = round_robin_assignment(7, 3);
    CHECK(a == std::vector<std::size_t>{0, 1, 2, 0, 1, 2, 0});
    const auto b = round_robin_assignment(2, 4);
    CHECK(b == std::vector<std::size_t>{0, 1});
  }

  TEST_CASE("scenario validation names the field") {
    auto s = small_scenario(4, 1, 2);
    CHECK_NOTHROW(validate(s));
    s.p_max = -1.0;
    CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("p_max"), InvalidArgument);
    s = small_scenario(4, 1, 2);
    s.noise_var = 0.0;
    CHECK_THROWS_WITH_AS(validate(s), doctest::Contains("noise_var"), InvalidArgument);
    s = small_scenario(4, 1, 2);
    s.su_assignment[2] = 5;
    CHECK_THROWS_AS(validate(s), InvalidArgument);
  }

  TEST_CASE("channel sampling is deterministic and seed dependent") {
    const auto s = small_scenario(8, 2, 3);
    const auto a = sample_channels(s, 42);
    const auto b = sample_channels(s, 42);
    const auto c = sample_channels(s, 43);
    CHECK(a == b);
    CHECK_FALSE(a.gain_ss_direct == c.gain_ss_direct);
    CHECK(a.gain_sp.rows() == 2);
    CHECK(a.gain_sp.cols() == 8);
    CHECK(a.gain_ss_cross.rows() == 8);
    for (std::size_t k = 0; k < 8; ++k) CHECK(a.gain_ss_cross(k, k) == 0.0);
    for (double g : a.gain_ss_direct) CHECK(g >= 0.0);
    for (double g : a.gain_sp.flat()) CHECK(g >= 0.0);
    for (double g : a.gain_ps.flat()) CHECK(g >= 0.0);
  }

  TEST_CASE("fewer PUs share a prefix of draws") {
    const auto two = sample_channels(small_scenario(8, 2, 3), 7);
    const auto one = sample_channels(small_scenario(8, 1, 3), 7);
    CHECK(one.gain_ss_direct == two.gain_ss_direct);
    CHECK(one.gain_ss_cross == two.gain_ss_cross);
    for (std::size_t k = 0; k < 8; ++k) CHECK(one.gain_sp(0, k) == two.gain_sp(0, k));
  }

  TEST_CASE("gains follow exponential(1): mean and KS statistic") {
    // 1e5 direct gains from one large draw.
    const auto s = small_scenario(100000 / 400, 0, 1);
    std::vector<double> g;
    for (std::uint64_t seed = 0; g.size() < 100000; ++seed) {
      const auto c = sample_channels(s, 1000 + seed);
      g.insert(g.end(), c.gain_ss_direct.begin(), c.gain_ss_direct.end());
      for (std::size_t i = 0; i < c.gain_ss_cross.rows() && g.size() < 100000; ++i) {
        for (std::size_t k = 0; k < c.gain_ss_cross.cols() && g.size() < 100000; ++k) {
          if (i != k) g.push_back(c.gain_ss_cross(i, k));
        }
      }
    }
    g.resize(100000);
    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(g.size());
    CHECK(mean >= 0.99);
    CHECK(mean <= 1.01);

    std::sort(g.begin(), g.end());
    const double n = static_cast<double>(g.size());
    double ks = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double cdf = 1.0 - std::exp(-g[i]);
      ks = std::max({ks, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
    }
    CHECK(ks < 0.01);
  }

  TEST_CASE("power vector helpers") {
    PowerVector p(std::vector<double>{0.5, 0.25, 1.0});
    CHECK(p.total() == 1.75);
    CHECK(p.min() == 0.25);
    CHECK(PowerVector(std::vector<double>{0.0, 1.0}) < PowerVector(std::vector<double>{0.5, 0.0}));
  }
}
