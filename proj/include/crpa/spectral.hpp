#pragma once

// Spectral-leakage interference between OFDM secondary users and primary
// users.
//
// Frequency conventions:
//  - Analog leakage (SU->PU, SU->SU) integrates the sinc^2 subcarrier PSD over
//    the victim band, in Hz.
//  - PU->SU leakage happens in the SU receiver's N-point FFT. The FFT samples
//    at N * B_s, so the digital axis [-pi, pi) is centred on the middle of the
//    OFDM grid and every subcarrier is a 2*pi/N window on it.

#include <cstddef>
#include <iosfwd>

#include "crpa/model.hpp"

namespace crpa {

/// sin^2(pi x) / (pi x)^2, equal to 1 at x = 0.
double sinc2(double x);

/// PSD of one subcarrier with power p_k: p_k * Ts * sinc^2(f * Ts). W/Hz.
double ofdm_psd(double p_k, double symbol_time, double f);

/// Fraction of a subcarrier's power that lands in a band of width `band`
/// whose centre sits `distance` Hz away: Ts * integral of sinc^2(f Ts) over
/// [d - band/2, d + band/2]. Result lies in [0, 1]; relative error <= 1e-9.
double leakage_factor(double symbol_time, double distance, double band);

/// I_k = p_k * gain_sp * factor.
inline double su_to_pu_interference(double p_k, double gain_sp, double factor) {
  return p_k * gain_sp * factor;
}

/// Squared Dirichlet kernel (sin(N x / 2) / sin(x / 2))^2, N^2 at x = 0 mod 2pi.
double fejer_kernel(std::size_t n, double x);

/// A PSD that is `level` on [lo, hi] (radians) and zero elsewhere on [-pi, pi).
/// Bands may extend past +-pi; the excess wraps around.
struct FlatBand {
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.0;
};

/// Expected periodogram of a flat-band PSD seen through an N-point FFT:
/// (1 / 2 pi N) * integral over the band of level * fejer_kernel(N, omega - phi).
double fejer_smoothed_psd(const FlatBand& band, std::size_t n, double omega);

/// Digital frequency of `freq` on the grid's FFT axis (not wrapped).
double digital_frequency(const OfdmGrid& grid, double freq);

/// The PU's band on the digital axis, with its PSD amplitude as level.
FlatBand digital_band(const OfdmGrid& grid, const PrimaryUser& pu);

/// fejer_smoothed_psd for a PU at digital frequency omega.
double fejer_smoothed_psd(const OfdmGrid& grid, const PrimaryUser& pu, double omega);

/// Integral of the smoothed PU PSD across subcarrier k's window, without the
/// PU->SU gain. Uses the identity that the double integral of a kernel of
/// (omega - phi) over two intervals is a single integral weighted by their
/// overlap (trapezoid) function.
double pu_overlap(const OfdmGrid& grid, const PrimaryUser& pu, std::size_t k);

/// Gain-free interference geometry. Depends only on the grid, the PU layout
/// and the SU assignment, so it can be shared across channel draws.
struct SpectralGeometry {
  Matrix sp_factor;   // L x K
  Matrix ps_overlap;  // L x K
  Matrix ss_factor;   // K x K, (source i, victim k)
};

struct InterferenceTables {
  Matrix sp_factor;        // L x K, dimensionless
  Matrix ps_interference;  // L x K, watts (J_k^{(l)})
  Matrix ss_factor;        // K x K, dimensionless, (source i, victim k)

  /// Sum over PUs of J_k^{(l)}.
  std::vector<double> pu_interference_total;
};

/// Leakage between subcarriers of the same SU is zero: one transmitter's OFDM
/// subcarriers stay orthogonal at its own receiver. Only pairs that belong to
/// different SUs couple through sidelobes.
SpectralGeometry compute_geometry(const Scenario& scenario);

InterferenceTables build_tables(const SpectralGeometry& geometry, const ChannelSet& channels);
InterferenceTables build_tables(const Scenario& scenario, const ChannelSet& channels);

/// J_k^{(l)} straight from quadrature (no tables).
double pu_to_su_interference(const Scenario& scenario, const ChannelSet& channels,
                             std::size_t l, std::size_t k);

/// Sum over i != k of p_i * gain_ss_cross(i, k) * ss_factor(i, k).
double su_to_su_interference(const PowerVector& p, const ChannelSet& channels,
                             const InterferenceTables& tables, std::size_t k);

/// CSV dump: table,l_or_i,k,factor_or_watts with table in {sp, ps, ss}.
void write_tables_csv(std::ostream& os, const InterferenceTables& tables);

}  // namespace crpa
