#include "crpa/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "crpa/errors.hpp"
#include "crpa/quadrature.hpp"

namespace crpa {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Per-piece tolerance, well below the 1e-9 contract because GK error
// estimates are conservative and pieces add up.
constexpr quad::Options kQuadOpts{1e-12, 0.0, 4000};

double wrap_to_pi(double x) { return std::remainder(x, kTwoPi); }

// Splits a band on the circle into pieces inside [-pi, pi].
std::vector<std::pair<double, double>> circle_pieces(double lo, double hi) {
  if (hi - lo >= kTwoPi) return {{-kPi, kPi}};
  double a = wrap_to_pi(lo);
  if (a >= kPi) a -= kTwoPi;
  const double b = a + (hi - lo);
  if (b <= kPi) return {{a, b}};
  return {{a, kPi}, {-kPi, b - kTwoPi}};
}

void sort_unique(std::vector<double>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

// Breakpoints at x0 + step * m strictly inside (a, b), plus a and b.
std::vector<double> lattice_breaks(double a, double b, double x0, double step) {
  std::vector<double> bp{a, b};
  const auto m_lo = static_cast<long long>(std::floor((a - x0) / step));
  const auto m_hi = static_cast<long long>(std::ceil((b - x0) / step));
  for (long long m = m_lo; m <= m_hi; ++m) {
    const double x = x0 + step * static_cast<double>(m);
    if (x > a && x < b) bp.push_back(x);
  }
  sort_unique(bp);
  return bp;
}

}  // namespace

double sinc2(double x) {
  const double px = kPi * x;
  if (std::abs(px) < 1e-8) return 1.0 - px * px / 3.0;
  const double s = std::sin(px) / px;
  return s * s;
}

double ofdm_psd(double p_k, double symbol_time, double f) {
  return p_k * symbol_time * sinc2(f * symbol_time);
}

double leakage_factor(double symbol_time, double distance, double band) {
  if (!(symbol_time > 0.0)) throw InvalidArgument("leakage_factor: symbol_time must be > 0");
  if (!(band >= 0.0)) throw InvalidArgument("leakage_factor: band must be >= 0");
  if (!std::isfinite(distance) || !std::isfinite(band)) {
    throw InvalidArgument("leakage_factor: inputs must be finite");
  }
  if (band == 0.0) return 0.0;
  // Substitute x = f * Ts; sinc^2 has nulls at the non-zero integers.
  const double a = (distance - 0.5 * band) * symbol_time;
  const double b = (distance + 0.5 * band) * symbol_time;
  auto bp = lattice_breaks(a, b, 0.0, 1.0);
  const auto r = quad::integrate_pieces([](double x) { return sinc2(x); }, bp, kQuadOpts);
  return std::clamp(r.value, 0.0, 1.0);
}

double fejer_kernel(std::size_t n, double x) {
  const double nn = static_cast<double>(n);
  const double xr = wrap_to_pi(x);
  if (std::abs(xr) < 1e-6) return nn * nn * (1.0 - (nn * nn - 1.0) * xr * xr / 12.0);
  const double s = std::sin(0.5 * nn * xr) / std::sin(0.5 * xr);
  return s * s;
}

double fejer_smoothed_psd(const FlatBand& band, std::size_t n, double omega) {
  if (n == 0) throw InvalidArgument("fejer_smoothed_psd: N must be >= 1");
  if (band.level == 0.0 || band.hi <= band.lo) return 0.0;
  const double nn = static_cast<double>(n);
  auto kernel = [&](double phi) { return fejer_kernel(n, omega - phi); };
  double sum = 0.0;
  for (const auto& [a, b] : circle_pieces(band.lo, band.hi)) {
    // Kernel nulls and peaks sit on omega + 2 pi m / N.
    const auto bp = lattice_breaks(a, b, omega, kTwoPi / nn);
    sum += quad::integrate_pieces(kernel, bp, kQuadOpts).value;
  }
  return band.level * sum / (kTwoPi * nn);
}

double digital_frequency(const OfdmGrid& grid, double freq) {
  const double ref = 0.5 * (grid.center_freq.front() + grid.center_freq.back());
  const double fs = static_cast<double>(grid.fft_size) * grid.subcarrier_bw;
  return kTwoPi * (freq - ref) / fs;
}

FlatBand digital_band(const OfdmGrid& grid, const PrimaryUser& pu) {
  return {digital_frequency(grid, pu.band_center - 0.5 * pu.band_width),
          digital_frequency(grid, pu.band_center + 0.5 * pu.band_width), pu.tx_power};
}

double fejer_smoothed_psd(const OfdmGrid& grid, const PrimaryUser& pu, double omega) {
  return fejer_smoothed_psd(digital_band(grid, pu), grid.fft_size, omega);
}

double pu_overlap(const OfdmGrid& grid, const PrimaryUser& pu, std::size_t k) {
  if (k >= grid.k_count) throw std::out_of_range("pu_overlap: subcarrier out of range");
  const auto band = digital_band(grid, pu);
  if (band.level == 0.0) return 0.0;
  const std::size_t n = grid.fft_size;
  const double nn = static_cast<double>(n);
  const double half = kPi / nn;
  const double wk = digital_frequency(grid, grid.center_freq[k]);
  const double wa = wk - half;
  const double wb = wk + half;

  double sum = 0.0;
  for (const auto& [pa, pb] : circle_pieces(band.lo, band.hi)) {
    // Length of {omega in [wa, wb] : omega - x in [pa, pb]}.
    auto overlap = [=](double x) {
      return std::max(0.0, std::min(wb, pb + x) - std::max(wa, pa + x));
    };
    auto integrand = [&](double x) { return fejer_kernel(n, x) * overlap(x); };
    const double xa = wa - pb;
    const double xb = wb - pa;
    auto bp = lattice_breaks(xa, xb, 0.0, kTwoPi / nn);
    for (double kink : {wa - pa, wb - pb}) {
      if (kink > xa && kink < xb) bp.push_back(kink);
    }
    sort_unique(bp);
    sum += quad::integrate_pieces(integrand, bp, kQuadOpts).value;
  }
  return band.level * sum / (kTwoPi * nn);
}

SpectralGeometry compute_geometry(const Scenario& s) {
  validate(s);
  const auto& grid = s.grid;
  const std::size_t k_count = grid.k_count;
  const std::size_t l_count = s.pu_count();

  SpectralGeometry g{Matrix(l_count, k_count), Matrix(l_count, k_count),
                     Matrix(k_count, k_count)};
  for (std::size_t l = 0; l < l_count; ++l) {
    const auto& pu = s.pus[l];
    for (std::size_t k = 0; k < k_count; ++k) {
      g.sp_factor(l, k) =
          leakage_factor(grid.symbol_time, spectral_distance(grid, pu, k), pu.band_width);
      g.ps_overlap(l, k) = pu_overlap(grid, pu, k);
    }
  }

  // Equal spacing: the SU->SU factor depends only on |i - k|.
  std::vector<double> by_offset(k_count, 0.0);
  for (std::size_t off = 1; off < k_count; ++off) {
    by_offset[off] = leakage_factor(grid.symbol_time,
                                    static_cast<double>(off) * grid.subcarrier_bw,
                                    grid.subcarrier_bw);
  }
  for (std::size_t i = 0; i < k_count; ++i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      if (i == k || s.su_assignment[i] == s.su_assignment[k]) continue;
      g.ss_factor(i, k) = by_offset[i > k ? i - k : k - i];
    }
  }
  return g;
}

InterferenceTables build_tables(const SpectralGeometry& g, const ChannelSet& c) {
  const std::size_t l_count = g.sp_factor.rows();
  const std::size_t k_count = g.ss_factor.rows();
  if (c.gain_ps.rows() != l_count || c.gain_ps.cols() != k_count ||
      c.gain_sp.rows() != l_count || c.gain_ss_direct.size() != k_count ||
      c.gain_ss_cross.rows() != k_count) {
    throw InvalidArgument("build_tables: channel dimensions do not match the scenario");
  }
  InterferenceTables t{g.sp_factor, Matrix(l_count, k_count), g.ss_factor,
                       std::vector<double>(k_count, 0.0)};
  for (std::size_t l = 0; l < l_count; ++l) {
    for (std::size_t k = 0; k < k_count; ++k) {
      t.ps_interference(l, k) = c.gain_ps(l, k) * g.ps_overlap(l, k);
      t.pu_interference_total[k] += t.ps_interference(l, k);
    }
  }
  return t;
}

InterferenceTables build_tables(const Scenario& s, const ChannelSet& c) {
  return build_tables(compute_geometry(s), c);
}

double pu_to_su_interference(const Scenario& s, const ChannelSet& c, std::size_t l,
                             std::size_t k) {
  if (l >= s.pu_count()) throw std::out_of_range("pu_to_su_interference: PU out of range");
  return c.gain_ps(l, k) * pu_overlap(s.grid, s.pus[l], k);
}

double su_to_su_interference(const PowerVector& p, const ChannelSet& c,
                             const InterferenceTables& t, std::size_t k) {
  if (k >= p.size()) throw std::out_of_range("su_to_su_interference: subcarrier out of range");
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i != k) sum += p[i] * c.gain_ss_cross(i, k) * t.ss_factor(i, k);
  }
  return sum;
}

void write_tables_csv(std::ostream& os, const InterferenceTables& t) {
  const auto old_precision = os.precision(17);
  os << "table,l_or_i,k,factor_or_watts\n";
  auto dump = [&](const char* name, const Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t k = 0; k < m.cols(); ++k) {
        os << name << ',' << r << ',' << k << ',' << m(r, k) << '\n';
      }
    }
  };
  dump("sp", t.sp_factor);
  dump("ps", t.ps_interference);
  dump("ss", t.ss_factor);
  os.precision(old_precision);
}

}  // namespace crpa
