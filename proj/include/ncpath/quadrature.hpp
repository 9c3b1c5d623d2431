#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ncpath/complex_erf.hpp"
#include "ncpath/errors.hpp"

namespace ncpath {

using Complex = std::complex<double>;

/// Controls for all sampled oscillatory integration.
///
/// points_per_cycle sets the base mesh density per 2*pi of local phase;
/// rel_tolerance is the mesh-doubling acceptance threshold; max_refinements
/// caps the number of doublings before ConvergenceError.
///
/// Acceptance is |I_new - I_old| <= rel_tolerance * max(|I_new|, 0.01 * L1)
/// where L1 is the base-mesh integral of |f|. The L1 floor is what lets
/// integrals that are genuinely ~0 (full oscillation periods) terminate; a
/// boundary-dominated oscillatory integral with |I| >= ~1e-4 * L1 still gets
/// the full relative tolerance against |I| after one extra halving.
struct QuadratureSpec {
  double points_per_cycle = 20.0;
  double rel_tolerance = 1e-9;
  int max_refinements = 8;

  void validate() const {
    if (!(points_per_cycle >= 4.0))
      throw ConfigError("QuadratureSpec: points_per_cycle must be >= 4");
    if (!(rel_tolerance > 0.0))
      throw ConfigError("QuadratureSpec: rel_tolerance must be > 0");
    if (max_refinements < 1)
      throw ConfigError("QuadratureSpec: max_refinements must be >= 1");
  }
};

/// Axis-aligned rectangle [a1,b1] x [a2,b2].
struct Rect {
  double a1, b1, a2, b2;
};

namespace detail {

inline constexpr double kL1FloorFraction = 1e-2;

/// Composite Boole weight at node i of n intervals (n % 4 == 0), spacing h.
inline double boole_weight(std::size_t i, std::size_t n, double h) {
  if (i == 0 || i == n) return h * (14.0 / 45.0);
  switch (i % 4) {
    case 1:
    case 3:
      return h * (64.0 / 45.0);
    case 2:
      return h * (24.0 / 45.0);
    default:
      return h * (28.0 / 45.0);
  }
}

inline std::size_t round_up_to_multiple_of_4(std::size_t n) {
  return (n + 3) / 4 * 4;
}

/// Base interval count so the mesh carries >= points_per_cycle nodes per
/// local oscillation of the fastest phase, never fewer than 16 intervals.
inline std::size_t base_intervals(double width, double max_phase_rate,
                                  const QuadratureSpec& spec) {
  const double cycles = width * std::max(max_phase_rate, 0.0) / (2.0 * M_PI);
  const double wanted = std::max(16.0, cycles * spec.points_per_cycle);
  if (wanted > 5e8) throw BudgetError("oscillatory mesh exceeds 5e8 nodes");
  return round_up_to_multiple_of_4(static_cast<std::size_t>(std::ceil(wanted)));
}

inline bool converged(Complex prev, Complex cur, double l1, const QuadratureSpec& spec) {
  const double scale = std::max(std::abs(cur), kL1FloorFraction * l1);
  return std::abs(cur - prev) <= spec.rel_tolerance * scale;
}

template <class R>
inline double max_rate_on(R&& rate, double a, double b) {
  double m = 0.0;
  constexpr int kSamples = 128;
  for (int i = 0; i <= kSamples; ++i) {
    const double x = a + (b - a) * static_cast<double>(i) / kSamples;
    m = std::max(m, std::abs(rate(x)));
  }
  return m;
}

}  // namespace detail

/// Integral of exp(i (p y^2 + q y)) over [a, b], in closed form.
///
/// For p != 0 the antiderivative is the complex error function along the
/// e^{±i pi/4} ray: complete the square with u = y + q/(2p) and
///   int e^{i p u^2} du = sqrt(pi)/(2 c) erf(c u),  c = sqrt(-i p).
/// For p == 0 the integrand is elementary.
inline Complex fresnel_segment(double p, double q, double a, double b) {
  if (!(a < b)) throw DomainError("fresnel_segment: requires a < b");
  if (!std::isfinite(p) || !std::isfinite(q))
    throw DomainError("fresnel_segment: non-finite coefficients");

  if (p == 0.0) {
    if (q == 0.0) return Complex(b - a, 0.0);
    // int e^{iqy} dy = (e^{iqb} - e^{iqa}) / (iq)
    const Complex num = std::polar(1.0, q * b) - std::polar(1.0, q * a);
    return num / Complex(0.0, q);
  }

  const double shift = q / (2.0 * p);
  const Complex c = std::sqrt(Complex(0.0, -p));  // principal branch
  const Complex pref = std::polar(1.0, -q * q / (4.0 * p)) * (0.5 * std::sqrt(M_PI)) / c;
  const Complex hi = complex_erf(c * (b + shift));
  const Complex lo = complex_erf(c * (a + shift));
  return pref * (hi - lo);
}

/// Leading-order stationary phase value of int f(y) e^{i k g(y)} dy around a
/// nondegenerate minimum-type stationary point:
///   f0 * e^{i k g0} * sqrt(2 pi / (k g2)) * e^{i pi/4}.
inline Complex stationary_phase_1d(Complex f0, double g0, double g2, double k) {
  if (!(g2 > 0.0)) throw DomainError("stationary_phase_1d: requires g'' > 0");
  if (!(k > 0.0)) throw DomainError("stationary_phase_1d: requires k > 0");
  return f0 * std::polar(std::sqrt(2.0 * M_PI / (k * g2)), k * g0 + M_PI / 4.0);
}

/// Sampled quadrature of a complex integrand over [a, b] on a phase-adapted
/// uniform mesh (composite Boole), refined by doubling until the convergence
/// contract in QuadratureSpec holds.
///
/// phase_rate(y) must return the local |d(phase)/dy| used to size the mesh.
/// Throws ConvergenceError (carrying the last two iterates) if max_refinements
/// doublings do not suffice.
template <class F, class R>
Complex oscillatory_integrate_1d(F&& integrand, R&& phase_rate, double a, double b,
                                 const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(a < b)) throw DomainError("oscillatory_integrate_1d: requires a < b");

  const double rate = detail::max_rate_on(phase_rate, a, b);
  std::size_t n = detail::base_intervals(b - a, rate, spec);

  std::vector<Complex> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    values[i] = integrand(a + (b - a) * static_cast<double>(i) / static_cast<double>(n));
  }

  const auto weighted_sum = [&](const std::vector<Complex>& v) {
    const std::size_t m = v.size() - 1;
    const double h = (b - a) / static_cast<double>(m);
    Complex s(0.0, 0.0);
    for (std::size_t i = 0; i <= m; ++i) s += detail::boole_weight(i, m, h) * v[i];
    return s;
  };

  // L1 scale from the base mesh; it only anchors the convergence floor.
  double l1 = 0.0;
  {
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i)
      l1 += detail::boole_weight(i, n, h) * std::abs(values[i]);
  }

  Complex prev = weighted_sum(values);
  Complex cur = prev;
  for (int r = 0; r < spec.max_refinements; ++r) {
    if (r > 0) prev = cur;
    // Interleave midpoints; previous nodes land on even indices.
    std::vector<Complex> finer(2 * n + 1);
    for (std::size_t i = 0; i <= n; ++i) finer[2 * i] = values[i];
    for (std::size_t i = 0; i < n; ++i) {
      const double x =
          a + (b - a) * (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n));
      finer[2 * i + 1] = integrand(x);
    }
    values.swap(finer);
    n *= 2;
    cur = weighted_sum(values);
    if (detail::converged(prev, cur, l1, spec)) return cur;
  }
  throw ConvergenceError("oscillatory_integrate_1d: no convergence after " +
                             std::to_string(spec.max_refinements) + " refinements",
                         prev, cur);
}

/// Tensor-product Boole rule over an axis-aligned rectangle with the 1d
/// convergence contract applied to simultaneous mesh doubling of both axes.
///
/// rate1/rate2 bound the local phase derivative along each axis. With
/// diagonal_singular set, a region touching the line y1 == y2 is rejected
/// (|y2-y1|^{-1/2}-type integrands are only integrable off the diagonal).
namespace detail {

template <class F>
Complex boole_2d_level(F&& integrand, const Rect& region, std::size_t m1, std::size_t m2,
                       double* l1_out) {
  const double h1 = (region.b1 - region.a1) / static_cast<double>(m1);
  const double h2 = (region.b2 - region.a2) / static_cast<double>(m2);
  Complex s(0.0, 0.0);
  double l1 = 0.0;
  for (std::size_t i = 0; i <= m1; ++i) {
    const double y1 = region.a1 + h1 * static_cast<double>(i);
    const double w1 = boole_weight(i, m1, h1);
    Complex row(0.0, 0.0);
    double row_abs = 0.0;
    for (std::size_t j = 0; j <= m2; ++j) {
      const double y2 = region.a2 + h2 * static_cast<double>(j);
      const double w2 = boole_weight(j, m2, h2);
      const Complex f = integrand(y1, y2);
      row += w2 * f;
      if (l1_out) row_abs += w2 * std::abs(f);
    }
    s += w1 * row;
    if (l1_out) l1 += w1 * row_abs;
  }
  if (l1_out) *l1_out = l1;
  return s;
}

}  // namespace detail

template <class F, class R1, class R2>
Complex oscillatory_integrate_2d(F&& integrand, R1&& rate1, R2&& rate2, const Rect& region,
                                 const QuadratureSpec& spec = {},
                                 bool diagonal_singular = false) {
  spec.validate();
  if (!(region.a1 < region.b1) || !(region.a2 < region.b2))
    throw DomainError("oscillatory_integrate_2d: degenerate region");
  if (diagonal_singular &&
      region.a1 <= region.b2 && region.a2 <= region.b1) {
    throw DomainError("oscillatory_integrate_2d: region touches the singular diagonal");
  }

  const double r1 = detail::max_rate_on(rate1, region.a1, region.b1);
  const double r2 = detail::max_rate_on(rate2, region.a2, region.b2);
  std::size_t n1 = detail::base_intervals(region.b1 - region.a1, r1, spec);
  std::size_t n2 = detail::base_intervals(region.b2 - region.a2, r2, spec);

  double l1 = 0.0;
  Complex prev = detail::boole_2d_level(integrand, region, n1, n2, &l1);
  Complex cur = prev;
  for (int r = 0; r < spec.max_refinements; ++r) {
    if (r > 0) prev = cur;
    n1 *= 2;
    n2 *= 2;
    cur = detail::boole_2d_level(integrand, region, n1, n2, nullptr);
    if (detail::converged(prev, cur, l1, spec)) return cur;
  }
  throw ConvergenceError("oscillatory_integrate_2d: no convergence after " +
                             std::to_string(spec.max_refinements) + " refinements",
                         prev, cur);
}

}  // namespace ncpath
