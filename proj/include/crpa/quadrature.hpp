#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature.
//
// The interval with the largest error estimate is bisected until the summed
// estimate drops below max(abs_tol, rel_tol * |value|). Estimates are the raw
// |K15 - G7| difference, which over-reports the true error on smooth
// integrands by several orders of magnitude.

#include <array>
#include <cmath>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "crpa/errors.hpp"

namespace crpa::quad {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evals = 0;
};

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_intervals = 4000;
};

namespace detail {

// Kronrod abscissae on [0, 1]; odd indices are the Gauss 7-point nodes.
inline constexpr std::array<double, 8> kXk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXk[j];
    const double s = f(center - dx) + f(center + dx);
    kronrod += kWk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half)};
}

}  // namespace detail

/// Integrates f over [a, b]. Throws NumericalError when the tolerance is not
/// met within opts.max_intervals subdivisions or the integrand goes non-finite.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opts = {}) {
  Result r;
  if (a == b) return r;
  std::priority_queue<detail::Segment> heap;
  auto first = detail::gk15(f, a, b);
  r.evals = 15;
  heap.push(first);
  double value = first.value;
  double error = first.error;
  int intervals = 1;
  auto converged = [&] {
    return error <= std::max(opts.abs_tol, opts.rel_tol * std::abs(value));
  };
  while (!converged()) {
    if (intervals >= opts.max_intervals) {
      throw NumericalError("quadrature did not converge on [" + std::to_string(a) + ", " +
                           std::to_string(b) + "]: error estimate " +
                           std::to_string(error) + " after " + std::to_string(intervals) +
                           " intervals");
    }
    const auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const auto left = detail::gk15(f, worst.a, mid);
    const auto right = detail::gk15(f, mid, worst.b);
    r.evals += 30;
    ++intervals;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the running updates.
  value = 0.0;
  error = 0.0;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  if (!std::isfinite(value)) throw NumericalError("quadrature produced a non-finite value");
  r.value = value;
  r.abs_error = error;
  return r;
}

/// Integrates over consecutive pieces [bp[0], bp[1]], [bp[1], bp[2]], ...
/// each to the requested tolerance. Breakpoints must be sorted.
template <class F>
Result integrate_pieces(F&& f, std::span<const double> breakpoints, const Options& opts = {}) {
  Result total;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const auto piece = integrate(f, breakpoints[i], breakpoints[i + 1], opts);
    total.value += piece.value;
    total.abs_error += piece.abs_error;
    total.evals += piece.evals;
  }
  return total;
}

}  // namespace crpa::quad
