#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "ncpath/experiment.hpp"
#include "ncpath/quadrature.hpp"

namespace ncpath {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;
};

inline double distance(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

/// Free-space kernel (k / 2 pi i) e^{ik r} / r between two points.
/// Carries dimension 1/length * k; only ratios of kernel products are exposed
/// by the Sorkin layer.
inline Complex free_propagator(const Vec3& r1, const Vec3& r2, double k) {
  if (!(k > 0.0)) throw DomainError("free_propagator: k must be > 0");
  const double r = distance(r1, r2);
  if (r == 0.0) throw DomainError("free_propagator: coincident points");
  // 1/(2 pi i) = -i/(2 pi)
  return Complex(0.0, -k / (2.0 * M_PI)) * std::polar(1.0 / r, k * r);
}

/// Nonempty set of open slits, as indices into SlitGeometry::centers.
class SlitSubset {
public:
  SlitSubset(std::initializer_list<int> indices) {
    for (int i : indices) {
      if (i < 0 || i >= 8) throw DomainError("SlitSubset: index out of range");
      mask_ |= (1u << i);
    }
    if (mask_ == 0) throw DomainError("SlitSubset: must be nonempty");
  }

  static SlitSubset all(int n) {
    if (n < 1 || n > 8) throw DomainError("SlitSubset: bad slit count");
    SlitSubset s;
    s.mask_ = (1u << n) - 1u;
    return s;
  }

  static SlitSubset single(int i) { return SlitSubset{i}; }

  bool contains(int i) const { return i >= 0 && i < 8 && (mask_ >> i) & 1u; }
  unsigned mask() const { return mask_; }

  int count() const {
    int c = 0;
    for (int i = 0; i < 8; ++i) c += contains(i);
    return c;
  }

  int max_index() const {
    for (int i = 7; i >= 0; --i)
      if (contains(i)) return i;
    return -1;
  }

  friend bool operator==(const SlitSubset&, const SlitSubset&) = default;

private:
  SlitSubset() = default;
  unsigned mask_ = 0;
};

/// Ordered pair of distinct slits: `first` is crossed on the way out from the
/// source, `second` before heading to the detector. Same-slit loops are
/// excluded by construction (they cancel out of kappa and would sit on the
/// |y2-y1|^{-1/2} singularity).
struct OrderedSlitPair {
  int first;
  int second;

  OrderedSlitPair(int f, int s) : first(f), second(s) {
    if (f < 0 || s < 0) throw DomainError("OrderedSlitPair: negative index");
    if (f == s) throw DomainError("OrderedSlitPair: slits must be distinct");
  }
};

namespace detail {

inline void check_subset(const ValidatedSetup& setup, const SlitSubset& slits) {
  if (slits.max_index() >= setup.slit_count())
    throw DomainError("slit subset refers past the configured slits");
}

inline void check_pair(const ValidatedSetup& setup, const OrderedSlitPair& pair) {
  if (pair.first >= setup.slit_count() || pair.second >= setup.slit_count())
    throw DomainError("slit pair refers past the configured slits");
}

inline Complex gamma_prefactor(double k, double L, double D) {
  return std::polar(1.0 / (L * D), k * (L + D));
}

/// Quadratic phase coefficient common to the y and z Fresnel factors.
inline double fresnel_p(double k, double L, double D) {
  return 0.5 * k * (1.0 / L + 1.0 / D);
}

}  // namespace detail

/// Common transverse factor C_z = int_{-h}^{h} exp(i k z^2 (1/2L + 1/2D)) dz.
/// The infinite-height sentinel takes the full Fresnel limit sqrt(pi/p) e^{i pi/4}.
inline Complex z_factor(const ValidatedSetup& setup, double height_half) {
  const double p = detail::fresnel_p(setup.wavenumber(), setup.source_distance(),
                                     setup.screen_distance());
  if (std::isinf(height_half)) {
    return std::polar(std::sqrt(M_PI / p), M_PI / 4.0);
  }
  if (!(height_half > 0.0)) throw DomainError("z_factor: height must be > 0");
  return fresnel_segment(p, 0.0, -height_half, height_half);
}

inline Complex z_factor(const ValidatedSetup& setup) {
  return z_factor(setup, setup.geometry().height_half);
}

/// Single-crossing (classical) kernel for a set of open slits at detector
/// height y_D, via per-slit Fresnel segments in closed form:
///
///   K1 = -(k/2pi)^2 [gamma] [C_z] sum_i e^{i phi0} F(p, q, c_i - w/2, c_i + w/2)
///
/// with p = k(1/2L + 1/2D), q = -k (y_S/L + y_D/D) and the constant phase
/// phi0 = k (y_S^2/2L + y_D^2/2D) retained so the value equals the Fraunhofer
/// integral of exp(ik[(y-y_S)^2/2L + (y_D-y)^2/2D]) exactly.
inline Complex k1(const ValidatedSetup& setup, const SlitSubset& slits, double y_D) {
  detail::check_subset(setup, slits);
  const double k = setup.wavenumber();
  const double L = setup.source_distance();
  const double D = setup.screen_distance();
  const double y_S = setup.source_offset();
  const double w = setup.slit_width();

  const double p = detail::fresnel_p(k, L, D);
  const double q = -k * (y_S / L + y_D / D);
  const double phi0 = k * (y_S * y_S / (2.0 * L) + y_D * y_D / (2.0 * D));

  const double k2pi = k / (2.0 * M_PI);
  Complex pref = Complex(-k2pi * k2pi, 0.0) * std::polar(1.0, phi0);
  if (setup.setup().include_global_prefactor) pref *= detail::gamma_prefactor(k, L, D);
  if (setup.setup().include_z_factor) pref *= z_factor(setup);

  Complex sum(0.0, 0.0);
  for (int i = 0; i < setup.slit_count(); ++i) {
    if (!slits.contains(i)) continue;
    const double c = setup.slit_center(i);
    sum += fresnel_segment(p, q, c - 0.5 * w, c + 0.5 * w);
  }
  const Complex out = pref * sum;
  if (!std::isfinite(out.real()) || !std::isfinite(out.imag()))
    throw DomainError("k1: non-finite result");
  return out;
}

namespace detail {

/// Tables for one refinement level of the pair integral. Both axes share the
/// node spacing h, so the coupling |y1 - y2|^{-1/2} e^{ik|y1-y2|} takes only
/// 2n+1 distinct values; w is stored reversed so the inner accumulation runs
/// with unit stride: index (n - i) + j corresponds to m = i - j.
struct PairTables {
  std::size_t n = 0;
  std::vector<double> ur, ui;        // Boole-weighted source factor, n+1
  std::vector<double> vr, vi;        // Boole-weighted detector factor, n+1
  std::vector<double> wrev_r, wrev_i;  // coupling, 2n+1, reversed
};

struct PairGeometry {
  double k, L, D, y_S, y_D;
  double a1, a2;   // slit lower edges (first, second)
  double w;        // common slit width
  double dc;       // center separation c_first - c_second
};

template <class Coupling>
inline void build_pair_tables(const PairGeometry& g, std::size_t n, Coupling&& coupling,
                              PairTables& t) {
  const double h = g.w / static_cast<double>(n);
  t.n = n;
  t.ur.resize(n + 1);
  t.ui.resize(n + 1);
  t.vr.resize(n + 1);
  t.vi.resize(n + 1);
  t.wrev_r.resize(2 * n + 1);
  t.wrev_i.resize(2 * n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    const double y1 = g.a1 + h * static_cast<double>(i);
    const double wgt = boole_weight(i, n, h);
    const double dy = y1 - g.y_S;
    const Complex u = std::polar(wgt, g.k * dy * dy / (2.0 * g.L));
    t.ur[i] = u.real();
    t.ui[i] = u.imag();
  }
  for (std::size_t j = 0; j <= n; ++j) {
    const double y2 = g.a2 + h * static_cast<double>(j);
    const double wgt = boole_weight(j, n, h);
    const double dy = g.y_D - y2;
    const Complex v = std::polar(wgt, g.k * dy * dy / (2.0 * g.D));
    t.vr[j] = v.real();
    t.vi[j] = v.imag();
  }
  // wrev[q] holds the coupling at m = n - q, i.e. separation |dc + (n - q) h|.
  for (std::size_t q = 0; q <= 2 * n; ++q) {
    const double sep = std::abs(g.dc + (static_cast<double>(n) - static_cast<double>(q)) * h);
    const Complex w = coupling(sep);
    t.wrev_r[q] = w.real();
    t.wrev_i[q] = w.imag();
  }
}

/// S = sum_i U_i sum_j V_j W_{i-j}; identical nodes and weights to the tensor
/// Boole rule, reorganized so transcendental evaluations are O(n).
inline Complex pair_mac_sum(const PairTables& t) {
  const std::size_t n = t.n;
  const double* vr = t.vr.data();
  const double* vi = t.vi.data();
  double acc_r = 0.0, acc_i = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double* wr = t.wrev_r.data() + (n - i);
    const double* wi = t.wrev_i.data() + (n - i);
    double pr[4] = {0.0, 0.0, 0.0, 0.0};
    double pi[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t j = 0;
    for (; j + 4 <= n + 1; j += 4) {
      for (std::size_t l = 0; l < 4; ++l) {
        pr[l] += vr[j + l] * wr[j + l] - vi[j + l] * wi[j + l];
        pi[l] += vr[j + l] * wi[j + l] + vi[j + l] * wr[j + l];
      }
    }
    for (; j <= n; ++j) {
      pr[0] += vr[j] * wr[j] - vi[j] * wi[j];
      pi[0] += vr[j] * wi[j] + vi[j] * wr[j];
    }
    const double prow = (pr[0] + pr[1]) + (pr[2] + pr[3]);
    const double pirow = (pi[0] + pi[1]) + (pi[2] + pi[3]);
    acc_r += t.ur[i] * prow - t.ui[i] * pirow;
    acc_i += t.ur[i] * pirow + t.ui[i] * prow;
  }
  return Complex(acc_r, acc_i);
}

inline double pair_l1_sum(const PairTables& t) {
  const std::size_t n = t.n;
  std::vector<double> va(n + 1), wa(2 * n + 1);
  for (std::size_t j = 0; j <= n; ++j) va[j] = std::hypot(t.vr[j], t.vi[j]);
  for (std::size_t q = 0; q <= 2 * n; ++q) wa[q] = std::hypot(t.wrev_r[q], t.wrev_i[q]);
  double acc = 0.0;
  for (std::size_t i = 0; i <= n; ++i) {
    const double* w = wa.data() + (n - i);
    double row = 0.0;
    for (std::size_t j = 0; j <= n; ++j) row += va[j] * w[j];
    acc += std::hypot(t.ur[i], t.ui[i]) * row;
  }
  return acc;
}

inline PairGeometry pair_geometry(const ValidatedSetup& setup, const OrderedSlitPair& pair,
                                  double y_D, double k) {
  PairGeometry g;
  g.k = k;
  g.L = setup.source_distance();
  g.D = setup.screen_distance();
  g.y_S = setup.source_offset();
  g.y_D = y_D;
  g.w = setup.slit_width();
  const double c1 = setup.slit_center(pair.first);
  const double c2 = setup.slit_center(pair.second);
  g.a1 = c1 - 0.5 * g.w;
  g.a2 = c2 - 0.5 * g.w;
  g.dc = c1 - c2;
  return g;
}

inline std::size_t pair_base_intervals(const PairGeometry& g, const QuadratureSpec& spec) {
  const double b1 = g.a1 + g.w, b2 = g.a2 + g.w;
  const double rate1 =
      g.k * (std::max(std::abs(g.a1 - g.y_S), std::abs(b1 - g.y_S)) / g.L + 1.0);
  const double rate2 =
      g.k * (std::max(std::abs(g.y_D - g.a2), std::abs(g.y_D - b2)) / g.D + 1.0);
  return base_intervals(g.w, std::max(rate1, rate2), spec);
}

/// Doubling ladder over the factored tensor rule. With richardson set, the
/// accepted value is extrapolated from the last two levels (used by the
/// direct-integration oracle, whose boundary-dominated outer integral sits
/// far below its L1 mass).
template <class Coupling>
Complex pair_ladder(const PairGeometry& g, const QuadratureSpec& spec, Coupling&& coupling,
                    bool richardson, const char* op) {
  std::size_t n = pair_base_intervals(g, spec);
  PairTables tables;
  build_pair_tables(g, n, coupling, tables);
  const double l1 = pair_l1_sum(tables);
  Complex prev = pair_mac_sum(tables);
  Complex cur = prev;
  for (int r = 0; r < spec.max_refinements; ++r) {
    if (r > 0) prev = cur;
    n *= 2;
    build_pair_tables(g, n, coupling, tables);
    cur = pair_mac_sum(tables);
    if (converged(prev, cur, l1, spec)) {
      return richardson ? cur + (cur - prev) / 63.0 : cur;
    }
  }
  throw ConvergenceError(std::string(op) + ": no convergence after " +
                             std::to_string(spec.max_refinements) + " refinements",
                         prev, cur);
}

/// The stationary-phase-reduced double integral over slit(first) x slit(second):
///   int dy1 int dy2 |y2-y1|^{-1/2} exp(ik[(y1-y_S)^2/2L + |y2-y1| + (y_D-y2)^2/2D])
/// with no prefactors applied.
inline Complex k2_pair_reduced(const ValidatedSetup& setup, const OrderedSlitPair& pair,
                               double y_D, double k, const QuadratureSpec& spec) {
  const PairGeometry g = pair_geometry(setup, pair, y_D, k);
  const auto coupling = [&](double sep) { return std::polar(1.0 / std::sqrt(sep), k * sep); };
  return pair_ladder(g, spec, coupling, /*richardson=*/false, "k2_pair");
}

inline Complex k2_prefactor(const ValidatedSetup& setup, double k) {
  const double k2pi = k / (2.0 * M_PI);
  // i^{3/2} (k/2pi)^{5/2}
  Complex pref = std::polar(std::pow(k2pi, 2.5), 0.75 * M_PI);
  if (setup.setup().apply_inclination_factor) pref *= 0.25;
  if (setup.setup().include_global_prefactor)
    pref *= gamma_prefactor(k, setup.source_distance(), setup.screen_distance());
  if (setup.setup().include_z_factor) pref *= z_factor(setup);
  return pref;
}

}  // namespace detail

/// Two-crossing (non-classical) kernel for one ordered slit pair, by the
/// stationary-phase-reduced double integral. The Kirchhoff obliquity factor
/// 1/4 (two right-angle kinks) is applied when the setup requests it.
inline Complex k2_pair(const ValidatedSetup& setup, const OrderedSlitPair& pair, double y_D,
                       const QuadratureSpec& spec = {}) {
  detail::check_pair(setup, pair);
  spec.validate();
  const double k = setup.wavenumber();
  const Complex value =
      detail::k2_prefactor(setup, k) * detail::k2_pair_reduced(setup, pair, y_D, k, spec);
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw DomainError("k2_pair: non-finite result");
  return value;
}

namespace detail {

/// Inner z2 integral of the pre-stationary-phase form at z1 = 0:
///   J(sep) = int_{-W}^{W} (sep^2 + z^2)^{-1/2}
///            exp(ik[ sqrt(sep^2 + z^2) + z^2/(2D) ]) dz  + tails,
/// where W = 8 sqrt(sep/k) spans several stationary-phase widths and the two
/// tails are handled by second-order integration by parts (a sharp cutoff
/// leaves an O(1/8) oscillation that would mask the stationary-phase error).
/// Node density is fixed at 48 per cycle so the oracle's accuracy does not
/// ride on the caller's points_per_cycle.
inline Complex direct_z2_integral(double sep, double k, double D) {
  const double window = 8.0 * std::sqrt(sep / k);
  const double span = k * (std::hypot(sep, window) - sep) +
                      k * window * window / (2.0 * D);
  const std::size_t n = round_up_to_multiple_of_4(static_cast<std::size_t>(
      std::max(32.0, std::ceil(48.0 * 2.0 * span / (2.0 * M_PI)))));
  const double h = 2.0 * window / static_cast<double>(n);
  Complex sum(0.0, 0.0);
  for (std::size_t i = 0; i <= n; ++i) {
    const double z = -window + h * static_cast<double>(i);
    const double rho = std::hypot(sep, z);
    const double phase = k * (rho + z * z / (2.0 * D));
    sum += boole_weight(i, n, h) * std::polar(1.0 / rho, phase);
  }

  // Tail: 2 * e^{ikg(W)} [ i f/(k g') - (f/g')'/(k^2 g') ] at zeta = W,
  // doubled because f and g are even in zeta.
  const double rho = std::hypot(sep, window);
  const double gp = window / rho + window / D;
  const double f = 1.0 / rho;
  const double dfog = -((1.0 + rho / D) + window * window / (rho * D)) /
                      ((window * (1.0 + rho / D)) * (window * (1.0 + rho / D)));
  const double gW = rho + window * window / (2.0 * D);
  const Complex bracket(-dfog / (k * k * gp), f / (k * gp));
  sum += 2.0 * std::polar(1.0, k * gW) * bracket;
  return sum;
}

}  // namespace detail

/// Direct evaluation of the pre-stationary-phase pair integral (testing
/// oracle for k2_pair): the z2 integral is carried out numerically around its
/// stationary point z2 = z1 = 0, the (y1, y2) integral by the same factored
/// tensor rule as k2_pair (the coupling J depends only on |y1 - y2|), with
/// Richardson extrapolation of the last two levels -- the boundary-dominated
/// outer integral sits orders below its L1 mass, and the plain accepted level
/// would carry quadrature error comparable to the stationary-phase error this
/// oracle exists to measure.
///
/// k_override replaces the setup's wavenumber so the node count stays
/// tractable; an estimate above 1e8 raises BudgetError.
inline Complex k2_pair_direct(const ValidatedSetup& setup, const OrderedSlitPair& pair,
                              double y_D, double k_override,
                              const QuadratureSpec& spec = {}) {
  detail::check_pair(setup, pair);
  spec.validate();
  if (!(k_override > 0.0)) throw DomainError("k2_pair_direct: k_override must be > 0");

  const double k = k_override;
  const double L = setup.source_distance();
  const double D = setup.screen_distance();
  const double w = setup.slit_width();
  if (std::abs(setup.slit_center(pair.first) - setup.slit_center(pair.second)) <= w)
    throw DomainError("k2_pair_direct: slits overlap");

  const detail::PairGeometry g = detail::pair_geometry(setup, pair, y_D, k);
  const std::size_t n0 = detail::pair_base_intervals(g, spec);
  const double inner_typ = 48.0 * 64.0 / (2.0 * M_PI);
  const double ladder_nodes =
      static_cast<double>(2 * (n0 << spec.max_refinements) + 1) * inner_typ;
  if (ladder_nodes > 1e8)
    throw BudgetError("k2_pair_direct: estimated node count exceeds 1e8");

  const auto coupling = [&](double sep) { return detail::direct_z2_integral(sep, k, D); };
  const Complex raw = detail::pair_ladder(g, spec, coupling, /*richardson=*/true, "k2_pair_direct");

  // Pre-stationary-phase prefactor i (k/2pi)^3, flags as in k2_pair.
  const double k2pi = k / (2.0 * M_PI);
  Complex pref = Complex(0.0, k2pi * k2pi * k2pi);
  if (setup.setup().apply_inclination_factor) pref *= 0.25;
  if (setup.setup().include_global_prefactor) pref *= detail::gamma_prefactor(k, L, D);
  if (setup.setup().include_z_factor) pref *= z_factor(setup);
  const Complex out = pref * raw;
  if (!std::isfinite(out.real()) || !std::isfinite(out.imag()))
    throw DomainError("k2_pair_direct: non-finite result");
  return out;
}

/// Kernel values at one detector position: per-slit classical amplitudes and
/// the six ordered two-crossing amplitudes. Subset kernels are their sums.
struct KernelBundle {
  double y_detector = 0.0;
  int slit_count = 0;
  bool nonclassical_included = true;
  std::array<Complex, 3> k1_single{};
  std::array<std::array<Complex, 3>, 3> k2{};  // [first][second], diagonal zero

  Complex k1_of(const SlitSubset& slits) const {
    Complex s(0.0, 0.0);
    for (int i = 0; i < slit_count; ++i)
      if (slits.contains(i)) s += k1_single[static_cast<std::size_t>(i)];
    return s;
  }

  Complex k2_of(const SlitSubset& slits) const {
    Complex s(0.0, 0.0);
    for (int i = 0; i < slit_count; ++i) {
      if (!slits.contains(i)) continue;
      for (int j = 0; j < slit_count; ++j) {
        if (i == j || !slits.contains(j)) continue;
        s += k2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      }
    }
    return s;
  }

  /// S_ij = K2(i->j) + K2(j->i).
  Complex pair_sum(int i, int j) const {
    return k2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +
           k2[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  }

  Complex k_total_of(const SlitSubset& slits) const { return k1_of(slits) + k2_of(slits); }
};

/// Evaluates every kernel the Sorkin layer needs at one detector position.
inline KernelBundle kernel_bundle(const ValidatedSetup& setup, double y_D,
                                  const QuadratureSpec& spec = {},
                                  bool include_nonclassical = true) {
  KernelBundle b;
  b.y_detector = y_D;
  b.slit_count = setup.slit_count();
  b.nonclassical_included = include_nonclassical;
  for (int i = 0; i < b.slit_count; ++i) {
    b.k1_single[static_cast<std::size_t>(i)] = k1(setup, SlitSubset::single(i), y_D);
  }
  if (include_nonclassical) {
    for (int i = 0; i < b.slit_count; ++i) {
      for (int j = 0; j < b.slit_count; ++j) {
        if (i == j) continue;
        b.k2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
            k2_pair(setup, OrderedSlitPair(i, j), y_D, spec);
      }
    }
  }
  return b;
}

/// K^Omega = K1^Omega + sum of ordered-pair K2 terms within Omega (truncated
/// at two slit-plane crossings).
inline Complex k_total(const ValidatedSetup& setup, const SlitSubset& slits, double y_D,
                       const QuadratureSpec& spec = {}, bool include_nonclassical = true) {
  detail::check_subset(setup, slits);
  Complex s = k1(setup, slits, y_D);
  if (include_nonclassical) {
    for (int i = 0; i < setup.slit_count(); ++i) {
      if (!slits.contains(i)) continue;
      for (int j = 0; j < setup.slit_count(); ++j) {
        if (i == j || !slits.contains(j)) continue;
        s += k2_pair(setup, OrderedSlitPair(i, j), y_D, spec);
      }
    }
  }
  return s;
}

/// Numerically folds two free propagators over a square window on an
/// intermediate plane x = plane_x (testing oracle for the composition
/// identity). The outer third of the window is cosine-tapered; a sharp edge
/// would ring at the percent level regardless of window size.
///
/// Requires the window to span at least 10 Fresnel zones.
inline Complex huygens_compose(const Vec3& r1, const Vec3& r3, double plane_x,
                               double half_window, double k, const QuadratureSpec& spec = {}) {
  spec.validate();
  if (!(k > 0.0)) throw DomainError("huygens_compose: k must be > 0");
  if (!((plane_x - r1.x) * (r3.x - plane_x) > 0.0))
    throw DomainError("huygens_compose: plane must lie strictly between the endpoints");
  if (!(half_window > 0.0)) throw DomainError("huygens_compose: window must be > 0");

  const double t = (plane_x - r1.x) / (r3.x - r1.x);
  const Vec3 rc{plane_x, r1.y + t * (r3.y - r1.y), r1.z + t * (r3.z - r1.z)};
  const double l1 = distance(r1, rc);
  const double l2 = distance(rc, r3);
  const double p = 0.5 * k * (1.0 / l1 + 1.0 / l2);
  const double zones = p * half_window * half_window / M_PI;
  if (zones < 10.0)
    throw DomainError("huygens_compose: window spans only " + std::to_string(zones) +
                      " Fresnel zones (need >= 10)");

  const auto taper = [](double u) {
    u = std::abs(u);
    if (u <= 2.0 / 3.0) return 1.0;
    if (u >= 1.0) return 0.0;
    // C-infinity bump rolloff; keeps the composite rule at full order.
    const double s = (u - 2.0 / 3.0) * 3.0;
    return std::exp(1.0 - 1.0 / (1.0 - s * s));
  };

  const auto integrand = [&](double y, double z) {
    const Vec3 rp{plane_x, y, z};
    const double ty = taper((y - rc.y) / half_window);
    const double tz = taper((z - rc.z) / half_window);
    return free_propagator(r1, rp, k) * free_propagator(rp, r3, k) * (ty * tz);
  };

  const auto rate_axis = [&](double offset1, double offset3) {
    // |d(l1+l2)/dy| <= |y-r1.y|/l1-ish; bound with the in-plane offsets.
    return [=](double coord) {
      const double g1 = std::abs(coord - offset1) / std::abs(plane_x - r1.x);
      const double g2 = std::abs(coord - offset3) / std::abs(r3.x - plane_x);
      return k * (g1 + g2);
    };
  };

  const Rect region{rc.y - half_window, rc.y + half_window, rc.z - half_window,
                    rc.z + half_window};
  return oscillatory_integrate_2d(integrand, rate_axis(r1.y, r3.y), rate_axis(r1.z, r3.z),
                                  region, spec);
}

}  // namespace ncpath
