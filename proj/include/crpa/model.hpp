#pragma once

// Domain types for downlink OFDM cognitive-radio power allocation.
//
// Indices are zero-based throughout: subcarrier k in [0, K), primary user
// l in [0, L), secondary user m in [0, M). Frequencies are in Hz, powers in
// watts, channel gains are dimensionless power gains |h|^2.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace crpa {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<const double> flat() const { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct OfdmGrid {
  std::size_t k_count = 0;
  double subcarrier_bw = 0.0;  // Hz
  double symbol_time = 0.0;    // s, always 1 / subcarrier_bw
  std::size_t fft_size = 0;
  std::vector<double> center_freq;  // Hz, one per subcarrier

  bool operator==(const OfdmGrid&) const = default;
};

enum class PsdShape { flat };

struct PrimaryUser {
  double band_center = 0.0;       // Hz
  double band_width = 0.0;        // Hz
  double tx_power = 0.0;          // W, PSD amplitude over the band
  double interference_cap = 0.0;  // W
  PsdShape psd_shape = PsdShape::flat;

  bool operator==(const PrimaryUser&) const = default;
};

/// Channel power gains. gain_sp and gain_ps are L x K; gain_ss_cross is
/// K x K indexed (source subcarrier i, victim subcarrier k) with a zero
/// diagonal.
struct ChannelSet {
  Matrix gain_sp;
  Matrix gain_ps;
  std::vector<double> gain_ss_direct;
  Matrix gain_ss_cross;

  bool operator==(const ChannelSet&) const = default;
};

struct Scenario {
  OfdmGrid grid;
  std::vector<PrimaryUser> pus;
  std::size_t su_count = 1;
  double noise_var = 0.0;  // W
  double p_max = 0.0;      // W
  std::vector<std::size_t> su_assignment;  // subcarrier -> SU index

  std::size_t k_count() const { return grid.k_count; }
  std::size_t pu_count() const { return pus.size(); }
};

/// Per-subcarrier transmit powers in watts.
class PowerVector {
 public:
  PowerVector() = default;
  explicit PowerVector(std::size_t k, double fill = 0.0) : p_(k, fill) {}
  explicit PowerVector(std::vector<double> p) : p_(std::move(p)) {}

  std::size_t size() const { return p_.size(); }
  double& operator[](std::size_t k) { return p_[k]; }
  double operator[](std::size_t k) const { return p_[k]; }

  std::span<const double> values() const { return p_; }
  auto begin() const { return p_.begin(); }
  auto end() const { return p_.end(); }
  auto begin() { return p_.begin(); }
  auto end() { return p_.end(); }

  double total() const;
  double min() const;

  bool operator==(const PowerVector&) const = default;
  auto operator<=>(const PowerVector&) const = default;

 private:
  std::vector<double> p_;
};

/// Splits `total_bw` into `k_count` equal subcarriers starting at `base_freq`.
/// Throws InvalidArgument on non-positive sizes or when the split is not exact
/// to within 1e-9 relative.
OfdmGrid build_grid(double total_bw, std::size_t k_count, std::size_t fft_size,
                    double base_freq);

/// |center_freq[k] - pu.band_center|. Throws std::out_of_range for bad k.
double spectral_distance(const OfdmGrid& grid, const PrimaryUser& pu, std::size_t k);

/// A primary user whose band is exactly subcarrier k's band.
PrimaryUser pu_on_subcarrier(const OfdmGrid& grid, std::size_t k, double tx_power,
                             double interference_cap);

/// Subcarrier k goes to SU k mod su_count.
std::vector<std::size_t> round_robin_assignment(std::size_t k_count,
                                                std::size_t su_count);

/// Throws InvalidArgument naming the offending field.
void validate(const Scenario& scenario);

/// Draws every gain independently from exponential(1), i.e. the squared
/// magnitude of a unit-power Rayleigh channel. Draw order is: direct gains,
/// cross gains (row-major), then per PU the SU->PU row and the PU->SU row, so
/// scenarios that differ only in PU count share a common prefix of draws.
ChannelSet sample_channels(const Scenario& scenario, std::uint64_t seed);

}  // namespace crpa
