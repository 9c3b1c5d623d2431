#pragma once

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ncpath/kernels.hpp"

namespace ncpath {

enum class DeltaMode { central_max, interference_sum };

inline const char* to_string(DeltaMode m) {
  return m == DeltaMode::central_max ? "central-max" : "interference-sum";
}

namespace detail {

inline void require_three_slits(const KernelBundle& b, const char* op) {
  if (b.slit_count != 3)
    throw ConfigError(std::string(op) +
                      ": needs exactly 3 slits; for 2 slits use two_slit_loop_deviation");
}

}  // namespace detail

/// Linear-order Sorkin term from one bundle:
///   2 Re{ conj(K1^C)(K2^{AB}+K2^{BA}) + conj(K1^A)(K2^{BC}+K2^{CB})
///        + conj(K1^B)(K2^{AC}+K2^{CA}) }.
inline double epsilon_linear_from_bundle(const KernelBundle& b) {
  detail::require_three_slits(b, "epsilon_linear");
  const Complex s01 = b.pair_sum(0, 1);
  const Complex s02 = b.pair_sum(0, 2);
  const Complex s12 = b.pair_sum(1, 2);
  return 2.0 * (std::conj(b.k1_single[2]) * s01 + std::conj(b.k1_single[0]) * s12 +
                std::conj(b.k1_single[1]) * s02)
                   .real();
}

/// Full Sorkin term. Algebraically identical to the seven-intensity
/// combination of the open-slit experiments with K = K1 + K2, assembled in
/// the cancellation-free form
///   epsilon = epsilon_linear + 2 Re{ conj(S_AB) S_AC + conj(S_AB) S_BC
///                                   + conj(S_AC) S_BC },
/// which keeps kappa exactly invariant under the common-factor toggles
/// (the classical inclusion-exclusion part cancels identically and is not
/// re-evaluated numerically).
inline double epsilon_full_from_bundle(const KernelBundle& b) {
  detail::require_three_slits(b, "epsilon_full");
  const Complex s01 = b.pair_sum(0, 1);
  const Complex s02 = b.pair_sum(0, 2);
  const Complex s12 = b.pair_sum(1, 2);
  const double quadratic =
      2.0 * (std::conj(s01) * s02 + std::conj(s01) * s12 + std::conj(s02) * s12).real();
  return epsilon_linear_from_bundle(b) + quadratic;
}

/// Literal seven-term inclusion-exclusion assembly
///   |K^{ABC}|^2 - |K^{AB}|^2 - |K^{AC}|^2 - |K^{BC}|^2 + |K^A|^2 + |K^B|^2 + |K^C|^2
/// kept as the cross-check route (it agrees with epsilon_full_from_bundle up
/// to floating-point cancellation noise of the big classical terms).
inline double epsilon_full_inclusion_exclusion(const KernelBundle& b) {
  detail::require_three_slits(b, "epsilon_full_inclusion_exclusion");
  const auto p = [&](const SlitSubset& s) { return std::norm(b.k_total_of(s)); };
  return p(SlitSubset{0, 1, 2}) - p(SlitSubset{0, 1}) - p(SlitSubset{0, 2}) -
         p(SlitSubset{1, 2}) + p(SlitSubset{0}) + p(SlitSubset{1}) + p(SlitSubset{2});
}

inline double epsilon_full(const ValidatedSetup& setup, double y_D,
                           const QuadratureSpec& spec = {}, bool include_nonclassical = true) {
  return epsilon_full_from_bundle(kernel_bundle(setup, y_D, spec, include_nonclassical));
}

inline double epsilon_linear(const ValidatedSetup& setup, double y_D,
                             const QuadratureSpec& spec = {},
                             bool include_nonclassical = true) {
  return epsilon_linear_from_bundle(kernel_bundle(setup, y_D, spec, include_nonclassical));
}

namespace detail {

/// delta in interference-sum mode from one bundle:
/// sum over slit pairs of |I_XY|, I_XY = |K^{XY}|^2 - |K^X|^2 - |K^Y|^2.
/// Throws when the sum is degenerate against the intensity scale (the
/// "false peaks" pathology of that normalization).
inline double delta_interference_sum(const KernelBundle& b) {
  double sum = 0.0;
  double ref = 0.0;
  for (int i = 0; i < b.slit_count; ++i) {
    for (int j = i + 1; j < b.slit_count; ++j) {
      const double pi = std::norm(b.k_total_of(SlitSubset::single(i)));
      const double pj = std::norm(b.k_total_of(SlitSubset::single(j)));
      const double pij = std::norm(b.k_total_of(SlitSubset{i, j}));
      sum += std::abs(pij - pi - pj);
      ref += pi + pj;
    }
  }
  if (!(sum > 1e-9 * ref))
    throw DegenerateNormalizationError(
        "delta: interference-sum normalizer is degenerate at y = " +
        std::to_string(b.y_detector));
  return sum;
}

inline int resolve_workers(int requested) {
  if (requested > 0) return std::min(requested, 64);
  if (const char* env = std::getenv("NCPATH_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return std::min(v, 64);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 64u));
}

}  // namespace detail

/// Normalization for epsilon. central_max evaluates |K^{ABC}|^2 at the
/// central maximum (y = 0 for mirror-symmetric setups, y_hint otherwise);
/// interference_sum uses the legacy sum of two-slit interference magnitudes
/// at y_hint and surfaces its small-denominator pathology as
/// DegenerateNormalizationError.
inline double delta(const ValidatedSetup& setup, DeltaMode mode, double y_hint = 0.0,
                    const QuadratureSpec& spec = {}, bool include_nonclassical = true) {
  if (mode == DeltaMode::central_max) {
    const double y_star = setup.mirror_symmetric() ? 0.0 : y_hint;
    const KernelBundle b = kernel_bundle(setup, y_star, spec, include_nonclassical);
    const double value = std::norm(b.k_total_of(SlitSubset::all(b.slit_count)));
    if (!(value > 0.0) || !std::isfinite(value))
      throw DegenerateNormalizationError("delta: central maximum intensity is degenerate");
    return value;
  }
  const KernelBundle b = kernel_bundle(setup, y_hint, spec, include_nonclassical);
  return detail::delta_interference_sum(b);
}

/// Two-slit looped-path deviation |psi_L| / |psi_A + psi_B| at y_D, where
/// psi_L = K2(A->B) + K2(B->A) and psi_A + psi_B = K1^{AB}.
inline double two_slit_loop_deviation(const ValidatedSetup& setup, double y_D,
                                      const QuadratureSpec& spec = {},
                                      bool include_nonclassical = true) {
  if (setup.slit_count() != 2)
    throw ConfigError("two_slit_loop_deviation: needs exactly 2 slits");
  const SlitSubset both{0, 1};
  const double denom = std::abs(k1(setup, both, y_D));
  const double central = std::abs(k1(setup, both, 0.0));
  if (denom < 1e-14 * central)
    throw DegenerateNormalizationError(
        "two_slit_loop_deviation: |psi_A + psi_B| is degenerate at y = " + std::to_string(y_D));
  if (!include_nonclassical) return 0.0;
  const Complex psi_loop =
      k2_pair(setup, OrderedSlitPair(0, 1), y_D, spec) + k2_pair(setup, OrderedSlitPair(1, 0), y_D, spec);
  return std::abs(psi_loop) / denom;
}

/// Everything recorded alongside a scan so it can be reproduced exactly.
struct ScanMetadata {
  std::string tool_version;
  std::string preset;  ///< preset name, empty when built from a config file
  ExperimentSetup setup;
  QuadratureSpec quadrature;
  bool include_nonclassical = true;
  DeltaMode delta_mode = DeltaMode::central_max;
  double delta_y = 0.0;
  bool delta_from_empirical_max = false;
  bool mirror_symmetric = true;
  std::string intensity_reference;
  std::vector<std::string> assumptions;
  std::vector<std::pair<int, std::string>> invalid_points;
};

/// Scan of the Sorkin quantities over detector position. All per-point lists
/// share the index; kappa_full[i] = epsilon_full[i] / delta exactly. Points
/// whose quadrature failed to converge are flagged invalid (NaN values) and
/// described in metadata.invalid_points.
struct SorkinScan {
  std::vector<double> y_values;
  std::vector<double> intensity_normalized;
  std::vector<double> epsilon_full;
  std::vector<double> epsilon_linear;
  std::vector<double> kappa_full;
  std::vector<double> kappa_linear;
  std::vector<std::uint8_t> point_valid;
  double delta = 0.0;
  ScanMetadata metadata;
};

/// Runs the kappa scan: per-point epsilon values (computed independently and
/// in parallel; worker count never changes the numbers), one delta, and the
/// triple-slit intensity normalized to its scan maximum.
inline SorkinScan kappa_scan(const ValidatedSetup& setup, double y_min, double y_max,
                             int n_points, DeltaMode mode = DeltaMode::central_max,
                             const QuadratureSpec& spec = {}, bool include_nonclassical = true,
                             int n_workers = 0) {
  spec.validate();
  if (n_points < 2) throw ConfigError("kappa_scan: n_points must be >= 2");
  if (!(y_min < y_max)) throw ConfigError("kappa_scan: requires y_min < y_max");
  if (setup.slit_count() != 3)
    throw ConfigError("kappa_scan: needs exactly 3 slits; for 2 slits use two_slit_loop_deviation");

  const double nan = std::numeric_limits<double>::quiet_NaN();
  SorkinScan scan;
  scan.y_values.resize(static_cast<std::size_t>(n_points));
  scan.intensity_normalized.assign(static_cast<std::size_t>(n_points), nan);
  scan.epsilon_full.assign(static_cast<std::size_t>(n_points), nan);
  scan.epsilon_linear.assign(static_cast<std::size_t>(n_points), nan);
  scan.kappa_full.assign(static_cast<std::size_t>(n_points), nan);
  scan.kappa_linear.assign(static_cast<std::size_t>(n_points), nan);
  scan.point_valid.assign(static_cast<std::size_t>(n_points), 0);
  for (int i = 0; i < n_points; ++i) {
    scan.y_values[static_cast<std::size_t>(i)] =
        y_min + (y_max - y_min) * static_cast<double>(i) / static_cast<double>(n_points - 1);
  }

  std::vector<double> intensity(static_cast<std::size_t>(n_points), nan);
  std::vector<std::string> failures(static_cast<std::size_t>(n_points));

  const auto evaluate_point = [&](std::size_t i) {
    try {
      const KernelBundle b = kernel_bundle(setup, scan.y_values[i], spec, include_nonclassical);
      scan.epsilon_full[i] = epsilon_full_from_bundle(b);
      scan.epsilon_linear[i] = epsilon_linear_from_bundle(b);
      intensity[i] = std::norm(b.k_total_of(SlitSubset{0, 1, 2}));
      scan.point_valid[i] = 1;
    } catch (const ConvergenceError& e) {
      failures[i] = e.what();
    }
  };

  const int workers = std::min(detail::resolve_workers(n_workers), n_points);
  if (workers <= 1) {
    for (std::size_t i = 0; i < scan.y_values.size(); ++i) evaluate_point(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= scan.y_values.size()) return;
          try {
            evaluate_point(i);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  // Normalization: one delta for the whole scan.
  scan.metadata.delta_mode = mode;
  scan.metadata.mirror_symmetric = setup.mirror_symmetric();
  if (mode == DeltaMode::central_max) {
    if (scan.metadata.mirror_symmetric) {
      scan.delta = delta(setup, DeltaMode::central_max, 0.0, spec, include_nonclassical);
      scan.metadata.delta_y = 0.0;
    } else {
      double best = -1.0;
      std::size_t best_i = 0;
      for (std::size_t i = 0; i < intensity.size(); ++i) {
        if (scan.point_valid[i] && intensity[i] > best) {
          best = intensity[i];
          best_i = i;
        }
      }
      if (!(best > 0.0))
        throw DegenerateNormalizationError("kappa_scan: no valid point for the empirical maximum");
      scan.delta = best;
      scan.metadata.delta_y = scan.y_values[best_i];
      scan.metadata.delta_from_empirical_max = true;
    }
  } else {
    const double y_hint = 0.0;
    scan.delta = delta(setup, DeltaMode::interference_sum, y_hint, spec, include_nonclassical);
    scan.metadata.delta_y = y_hint;
  }

  double peak = 0.0;
  for (std::size_t i = 0; i < intensity.size(); ++i) {
    if (scan.point_valid[i]) peak = std::max(peak, intensity[i]);
  }
  if (!(peak > 0.0))
    throw DegenerateNormalizationError("kappa_scan: all scan points failed or are dark");

  for (std::size_t i = 0; i < intensity.size(); ++i) {
    if (!scan.point_valid[i]) {
      scan.metadata.invalid_points.emplace_back(static_cast<int>(i), failures[i]);
      continue;
    }
    scan.intensity_normalized[i] = intensity[i] / peak;
    scan.kappa_full[i] = scan.epsilon_full[i] / scan.delta;
    scan.kappa_linear[i] = scan.epsilon_linear[i] / scan.delta;
  }

  scan.metadata.setup = setup.setup();
  scan.metadata.quadrature = spec;
  scan.metadata.include_nonclassical = include_nonclassical;
  scan.metadata.intensity_reference = "scan maximum of |K^{ABC}|^2";
  return scan;
}

}  // namespace ncpath
