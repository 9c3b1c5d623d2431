#pragma once

#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>

#include "ncpath/errors.hpp"

namespace ncpath {

namespace detail {

inline constexpr double kInvSqrtPi = 0.564189583547756286948079451561;  // 1/sqrt(pi)

/// Maclaurin series erf(z) = (2/sqrt(pi)) sum (-1)^n z^(2n+1) / (n! (2n+1)).
/// Accurate while the alternating-term cancellation e^(2x^2) stays small,
/// i.e. for |Re z| <= ~1.8.
inline std::complex<double> erf_maclaurin(std::complex<double> z) {
  const std::complex<double> z2 = z * z;
  std::complex<double> term(1.0, 0.0);  // (-z^2)^n / n!
  std::complex<double> sum(1.0, 0.0);   // term / (2n+1), accumulated
  for (int n = 1; n < 4000; ++n) {
    term *= -z2 / static_cast<double>(n);
    const std::complex<double> inc = term / static_cast<double>(2 * n + 1);
    sum += inc;
    if (std::abs(inc) < 1e-18 * std::abs(sum)) {
      return 2.0 * kInvSqrtPi * z * sum;
    }
  }
  throw OverflowError("complex_erf: Maclaurin series failed to terminate");
}

/// Faddeeva function w(zeta) for Im(zeta) >= 0 by the continued fraction
/// w = (i/sqrt(pi)) / (zeta - (1/2)/(zeta - 1/(zeta - (3/2)/(...)))),
/// evaluated with the modified Lentz algorithm.
inline std::complex<double> faddeeva_cf(std::complex<double> zeta) {
  const double tiny = 1e-290;
  std::complex<double> f(tiny, 0.0);
  std::complex<double> c = f;
  std::complex<double> d(0.0, 0.0);
  for (int n = 0; n < 2000; ++n) {
    // a_1 = 1, b_n = zeta, a_{n+1} = -n/2
    const std::complex<double> a = (n == 0) ? std::complex<double>(1.0, 0.0)
                                            : std::complex<double>(-0.5 * n, 0.0);
    d = zeta + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = zeta + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const std::complex<double> delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) {
      return std::complex<double>(0.0, kInvSqrtPi) * f;
    }
  }
  throw OverflowError("complex_erf: continued fraction failed to converge");
}

/// Asymptotic series for sqrt(pi) z e^(z^2) erfc(z) = sum (-1)^n (2n-1)!!/(2z^2)^n,
/// for large |z| with Re z > 0.
inline std::complex<double> erfc_scaled_asymptotic(std::complex<double> z) {
  const std::complex<double> inv2z2 = 0.5 / (z * z);
  std::complex<double> term(1.0, 0.0);
  std::complex<double> sum(1.0, 0.0);
  for (int n = 1; n < 60; ++n) {
    term *= -static_cast<double>(2 * n - 1) * inv2z2;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

/// erfc(z) for Re z >= 1.8 (no cancellation in 1 - erfc there that we care
/// about; callers form erf = 1 - erfc).
inline std::complex<double> erfc_right_halfplane(std::complex<double> z) {
  const std::complex<double> emz2 = std::exp(-z * z);
  if (std::abs(z) >= 12.0) {
    return emz2 * kInvSqrtPi / z * erfc_scaled_asymptotic(z);
  }
  // erfc(z) = e^(-z^2) w(iz), Im(iz) = Re z > 0.
  return emz2 * faddeeva_cf(std::complex<double>(-z.imag(), z.real()));
}

}  // namespace detail

/// Error function of a complex argument.
///
/// Regimes: Maclaurin series for |Re z| <= 1.8 (cancellation bounded by
/// e^(2 Re(z)^2)), Lentz continued fraction for the Faddeeva function in the
/// mid range, and the erfc asymptotic series for |z| >= 12. Relative accuracy
/// is ~1e-13 across |z| <= 30 away from the overflow sector.
///
/// Throws OverflowError where |erf| itself exceeds double range
/// (Im(z)^2 - Re(z)^2 > ~700, the e^{|z|^2} growth sector).
inline std::complex<double> complex_erf(std::complex<double> z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("complex_erf: non-finite argument");
  }
  // Reductions: erf(-z) = -erf(z), erf(conj z) = conj(erf(z)).
  double sign = 1.0;
  if (z.real() < 0.0 || (z.real() == 0.0 && z.imag() < 0.0)) {
    z = -z;
    sign = -1.0;
  }
  bool conjugated = false;
  if (z.imag() < 0.0) {
    z = std::conj(z);
    conjugated = true;
  }

  const double x = z.real();
  const double y = z.imag();
  if (y * y - x * x > 700.0) {
    throw OverflowError("complex_erf: |erf| overflows double in the growth sector");
  }

  std::complex<double> result;
  if (x <= 1.8) {
    result = detail::erf_maclaurin(z);
  } else {
    result = 1.0 - detail::erfc_right_halfplane(z);
  }

  if (conjugated) result = std::conj(result);
  return sign * result;
}

}  // namespace ncpath
