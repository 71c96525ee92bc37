#include "crpa/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "crpa/errors.hpp"

namespace crpa {

// Neumaier summation, so K equal shares of a budget add back to the budget.
double PowerVector::total() const {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : p_) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double PowerVector::min() const {
  return p_.empty() ? 0.0 : *std::min_element(p_.begin(), p_.end());
}

OfdmGrid build_grid(double total_bw, std::size_t k_count, std::size_t fft_size,
                    double base_freq) {
  if (!(total_bw > 0.0) || !std::isfinite(total_bw)) {
    throw InvalidArgument("build_grid: total_bw must be positive and finite");
  }
  if (k_count == 0) throw InvalidArgument("build_grid: k_count must be >= 1");
  if (fft_size == 0) throw InvalidArgument("build_grid: fft_size must be >= 1");
  if (!std::isfinite(base_freq)) throw InvalidArgument("build_grid: base_freq must be finite");

  const double bs = total_bw / static_cast<double>(k_count);
  // Subcarrier spacing must come out as a whole number of Hz.
  if (std::abs(bs - std::round(bs)) > 1e-9 * std::max(1.0, bs)) {
    throw InvalidArgument("build_grid: total_bw " + std::to_string(total_bw) +
                          " Hz does not split into " + std::to_string(k_count) +
                          " equal integer-Hz subcarriers");
  }

  OfdmGrid g;
  g.k_count = k_count;
  g.subcarrier_bw = bs;
  g.symbol_time = 1.0 / bs;
  g.fft_size = fft_size;
  g.center_freq.resize(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    g.center_freq[k] = base_freq + (static_cast<double>(k) + 0.5) * bs;
  }
  return g;
}

double spectral_distance(const OfdmGrid& grid, const PrimaryUser& pu, std::size_t k) {
  if (k >= grid.k_count) {
    throw std::out_of_range("spectral_distance: subcarrier " + std::to_string(k) +
                            " out of range for K=" + std::to_string(grid.k_count));
  }
  return std::abs(grid.center_freq[k] - pu.band_center);
}

PrimaryUser pu_on_subcarrier(const OfdmGrid& grid, std::size_t k, double tx_power,
                             double interference_cap) {
  if (k >= grid.k_count) {
    throw std::out_of_range("pu_on_subcarrier: subcarrier out of range");
  }
  return PrimaryUser{grid.center_freq[k], grid.subcarrier_bw, tx_power, interference_cap,
                     PsdShape::flat};
}

std::vector<std::size_t> round_robin_assignment(std::size_t k_count, std::size_t su_count) {
  if (su_count == 0) throw InvalidArgument("round_robin_assignment: su_count must be >= 1");
  std::vector<std::size_t> a(k_count);
  for (std::size_t k = 0; k < k_count; ++k) a[k] = k % su_count;
  return a;
}

void validate(const Scenario& s) {
  const auto& g = s.grid;
  if (g.k_count == 0) throw InvalidArgument("scenario.grid.k_count must be >= 1");
  if (!(g.subcarrier_bw > 0.0)) throw InvalidArgument("scenario.grid.subcarrier_bw must be > 0");
  if (!(g.symbol_time > 0.0)) throw InvalidArgument("scenario.grid.symbol_time must be > 0");
  if (g.fft_size == 0) throw InvalidArgument("scenario.grid.fft_size must be >= 1");
  if (g.center_freq.size() != g.k_count) {
    throw InvalidArgument("scenario.grid.center_freq must have k_count entries");
  }
  if (!(s.noise_var > 0.0) || !std::isfinite(s.noise_var)) {
    throw InvalidArgument("scenario.noise_var must be positive and finite");
  }
  if (!(s.p_max > 0.0) || !std::isfinite(s.p_max)) {
    throw InvalidArgument("scenario.p_max must be positive and finite");
  }
  if (s.su_count == 0) throw InvalidArgument("scenario.su_count must be >= 1");
  if (s.su_assignment.size() != g.k_count) {
    throw InvalidArgument("scenario.su_assignment must cover every subcarrier");
  }
  for (auto m : s.su_assignment) {
    if (m >= s.su_count) throw InvalidArgument("scenario.su_assignment refers to unknown SU");
  }
  for (std::size_t l = 0; l < s.pus.size(); ++l) {
    const auto& pu = s.pus[l];
    const std::string key = "scenario.pus[" + std::to_string(l) + "]";
    if (!(pu.band_width > 0.0)) throw InvalidArgument(key + ".band_width must be > 0");
    if (!(pu.tx_power >= 0.0)) throw InvalidArgument(key + ".tx_power must be >= 0");
    if (!(pu.interference_cap > 0.0)) {
      throw InvalidArgument(key + ".interference_cap must be > 0");
    }
  }
}

ChannelSet sample_channels(const Scenario& s, std::uint64_t seed) {
  const std::size_t k_count = s.k_count();
  const std::size_t l_count = s.pu_count();
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gain(1.0);

  ChannelSet c;
  c.gain_ss_direct.resize(k_count);
  for (auto& g : c.gain_ss_direct) g = gain(rng);

  c.gain_ss_cross = Matrix(k_count, k_count);
  for (std::size_t i = 0; i < k_count; ++i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      if (i != k) c.gain_ss_cross(i, k) = gain(rng);
    }
  }

  c.gain_sp = Matrix(l_count, k_count);
  c.gain_ps = Matrix(l_count, k_count);
  for (std::size_t l = 0; l < l_count; ++l) {
    for (std::size_t k = 0; k < k_count; ++k) c.gain_sp(l, k) = gain(rng);
    for (std::size_t k = 0; k < k_count; ++k) c.gain_ps(l, k) = gain(rng);
  }
  return c;
}

}  // namespace crpa
