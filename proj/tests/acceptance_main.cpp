// Acceptance suite: runs each shipping criterion at its stated tolerance and
// prints one pass/fail line per criterion. Exit status is the number of
// failed criteria. An optional argument selects a single criterion by number.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ncpath/ncpath.hpp"

using namespace ncpath;
using C = std::complex<double>;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double now_s() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof buf, f, args);
  va_end(args);
  return buf;
}

double kappa_at(const ValidatedSetup& setup, double y, const QuadratureSpec& spec = {}) {
  const KernelBundle b = kernel_bundle(setup, y, spec);
  const KernelBundle b0 = kernel_bundle(setup, 0.0, spec);
  return epsilon_full_from_bundle(b) / std::norm(b0.k_total_of(SlitSubset::all(3)));
}

// --- criteria -------------------------------------------------------------

Outcome criterion_photon_window() {
  const auto setup = validate(preset(PresetName::photon));
  const double t0 = now_s();
  const double kappa0 = kappa_at(setup, 0.0);
  const double t_point = now_s() - t0;

  const double t1 = now_s();
  const SorkinScan scan = kappa_scan(setup, -1.5e-3, 1.5e-3, 201);
  const double t_scan = now_s() - t1;

  const bool in_window = std::abs(kappa0) >= 1e-7 && std::abs(kappa0) <= 1e-5;
  const bool timing = t_point < 30.0 && t_scan < 600.0;
  bool scan_consistent = true;
  for (std::size_t i = 0; i < scan.point_valid.size(); ++i) {
    if (!scan.point_valid[i]) scan_consistent = false;
  }
  return {in_window && timing && scan_consistent,
          fmt("kappa(0) = %+.3e (window [1e-7, 1e-5]), point %.2f s, 201-point scan %.1f s",
              kappa0, t_point, t_scan)};
}

Outcome criterion_microwave_window() {
  const auto setup = validate(preset(PresetName::microwave));
  const double kappa0 = kappa_at(setup, 0.0);
  return {std::abs(kappa0) >= 1e-4 && std::abs(kappa0) <= 1e-2,
          fmt("kappa(0) = %+.3e (window [1e-4, 1e-2])", kappa0)};
}

Outcome criterion_wavelength_monotonicity() {
  double prev = 0.0;
  std::string detail;
  bool pass = true;
  for (double lambda : {810e-9, 8.1e-6, 81e-6}) {
    ExperimentSetup s = preset(PresetName::photon);
    s.beam.wavenumber = 2.0 * M_PI / lambda;
    const double k0 = std::abs(kappa_at(validate(s), 0.0));
    detail += fmt("|kappa|(%.2e m) = %.3e  ", lambda, k0);
    if (k0 <= prev) pass = false;
    prev = k0;
  }
  return {pass, detail};
}

Outcome criterion_classical_cancellation() {
  const auto setup = validate(preset(PresetName::photon));
  const double d = delta(setup, DeltaMode::central_max, 0.0, {}, false);
  double worst = 0.0;
  for (int i = 0; i < 41; ++i) {
    const double y = -1.5e-3 + 3e-3 * i / 40.0;
    const KernelBundle b = kernel_bundle(setup, y, {}, false);
    worst = std::max(worst, std::abs(epsilon_full_inclusion_exclusion(b)) / d);
    worst = std::max(worst, std::abs(epsilon_full_from_bundle(b)) / d);
  }
  return {worst < 1e-10, fmt("max |epsilon|/delta = %.3e (< 1e-10)", worst)};
}

Outcome criterion_linear_consistency() {
  const auto setup = validate(preset(PresetName::photon));
  const KernelBundle b = kernel_bundle(setup, 0.0);
  const double ef = epsilon_full_from_bundle(b);
  const double el = epsilon_linear_from_bundle(b);
  const double rel = std::abs(ef - el) / std::abs(ef);
  return {rel < 1e-3, fmt("|eps_full - eps_linear|/|eps_full| = %.3e (< 1e-3)", rel)};
}

Outcome criterion_k1_additivity() {
  const auto setup = validate(preset(PresetName::photon));
  std::mt19937 rng(2026);
  std::uniform_real_distribution<double> ys(-2e-3, 2e-3);
  const std::pair<SlitSubset, SlitSubset> splits[] = {
      {SlitSubset{0}, SlitSubset{1}}, {SlitSubset{0}, SlitSubset{2}},
      {SlitSubset{1}, SlitSubset{2}}, {SlitSubset{0, 1}, SlitSubset{2}},
      {SlitSubset{0, 2}, SlitSubset{1}}, {SlitSubset{1, 2}, SlitSubset{0}}};
  double worst = 0.0;
  for (int n = 0; n < 20; ++n) {
    const double y = ys(rng);
    for (const auto& [lhs, rhs] : splits) {
      SlitSubset both = SlitSubset::all(3);
      if (lhs.mask() + rhs.mask() == 0b011u) both = SlitSubset{0, 1};
      if (lhs.mask() + rhs.mask() == 0b101u) both = SlitSubset{0, 2};
      if (lhs.mask() + rhs.mask() == 0b110u) both = SlitSubset{1, 2};
      const C whole = k1(setup, both, y);
      const C parts = k1(setup, lhs, y) + k1(setup, rhs, y);
      worst = std::max(worst, std::abs(whole - parts) / std::abs(whole));
    }
  }
  return {worst < 1e-13, fmt("max relative defect = %.3e (< 1e-13)", worst)};
}

Outcome criterion_fresnel_oracle() {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> pq(-5e3, 5e3), edge(-2.0, 2.0);
  double worst = 0.0;
  const auto simpson = [](double p, double q, double a, double b, std::size_t n) {
    const double h = (b - a) / static_cast<double>(n);
    C s(0, 0);
    for (std::size_t i = 0; i <= n; ++i) {
      const double y = a + h * static_cast<double>(i);
      const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * std::polar(1.0, p * y * y + q * y);
    }
    return s * (h / 3.0);
  };
  for (int i = 0; i < 47; ++i) {
    const double p = (i % 9 == 0) ? 0.0 : pq(rng);
    const double q = pq(rng);
    double a = edge(rng), b = edge(rng);
    if (std::abs(b - a) < 1e-3) b = a + 1.0;
    if (a > b) std::swap(a, b);
    const C closed = fresnel_segment(p, q, a, b);
    const C oracle = simpson(p, q, a, b, 1000000);
    worst = std::max(worst, std::abs(closed - oracle) / std::abs(oracle));
  }
  // preset-scale coefficients over slit-sized intervals
  const double slit_cases[3][4] = {{4.31e7, -6.46e4, 8.5e-5, 1.15e-4},
                                   {4.31e7, 0.0, -1.5e-5, 1.5e-5},
                                   {3.93e0, -1.2e1, 3.4, 4.6}};
  for (const auto& c : slit_cases) {
    const C closed = fresnel_segment(c[0], c[1], c[2], c[3]);
    const C oracle = simpson(c[0], c[1], c[2], c[3], 1000000);
    worst = std::max(worst, std::abs(closed - oracle) / std::abs(oracle));
  }
  return {worst < 1e-8, fmt("50 cases, max relative difference = %.3e (< 1e-8)", worst)};
}

Outcome criterion_stationary_phase_validity() {
  const auto setup = validate(preset(PresetName::photon));
  const double d = 100e-6;
  const auto discrepancy = [&](double kd, double ppc) {
    const double k_ov = kd / d;
    ExperimentSetup s = preset(PresetName::photon);
    s.beam.wavenumber = k_ov;
    const auto scaled = validate(s);
    QuadratureSpec spec;
    spec.rel_tolerance = 1e-6;
    spec.points_per_cycle = ppc;
    const C direct = k2_pair_direct(setup, OrderedSlitPair(0, 1), 0.0, k_ov, spec);
    const C sp = k2_pair(scaled, OrderedSlitPair(0, 1), 0.0, spec);
    return std::abs(sp - direct) / std::abs(direct);
  };
  const double rel_200 = discrepancy(200.0, 20.0);
  const double rel_400 = discrepancy(400.0, 12.0);
  const bool pass = rel_200 <= 5.0 / 200.0 && rel_400 <= 5.0 / 400.0 && rel_400 < rel_200;
  return {pass, fmt("k*d=200: %.3e (<= %.3e); k*d=400: %.3e (shrinks: %s)", rel_200, 5.0 / 200.0,
                    rel_400, rel_400 < rel_200 ? "yes" : "no")};
}

Outcome criterion_huygens() {
  const double k = 2.0 * M_PI / 810e-9;
  const Vec3 r1{-0.1, 0, 0}, r3{0.1, 0, 0};
  const double p = 0.5 * k * (1 / 0.1 + 1 / 0.1);
  QuadratureSpec spec;
  spec.rel_tolerance = 1e-6;
  const C direct = free_propagator(r1, r3, k);
  double worst = 0.0;
  for (double zones : {30.0, 45.0}) {
    const double hw = std::sqrt(zones * M_PI / p);
    const C composed = huygens_compose(r1, r3, 0.0, hw, k, spec);
    worst = std::max(worst, std::abs(composed - direct) / std::abs(direct));
  }
  return {worst < 1e-2, fmt("max relative error over {30, 45} zones = %.3e (< 1e-2)", worst)};
}

Outcome criterion_symmetry_suite() {
  std::string detail;
  bool pass = true;

  // kappa(y) = kappa(-y) on the symmetric presets
  {
    const auto setup = validate(preset(PresetName::photon));
    const SorkinScan scan = kappa_scan(setup, -1.5e-3, 1.5e-3, 41);
    double peak = 0.0, worst = 0.0;
    for (double v : scan.kappa_full) peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < scan.kappa_full.size(); ++i) {
      worst = std::max(worst,
                       std::abs(scan.kappa_full[i] - scan.kappa_full[40 - i]) / peak);
    }
    detail += fmt("photon mirror defect %.2e; ", worst);
    if (worst > 1e-9) pass = false;
  }
  {
    const auto setup = validate(preset(PresetName::microwave));
    const SorkinScan scan = kappa_scan(setup, -2.0, 2.0, 21);
    double peak = 0.0, worst = 0.0;
    for (double v : scan.kappa_full) peak = std::max(peak, std::abs(v));
    for (std::size_t i = 0; i < scan.kappa_full.size(); ++i) {
      worst = std::max(worst,
                       std::abs(scan.kappa_full[i] - scan.kappa_full[20 - i]) / peak);
    }
    detail += fmt("microwave mirror defect %.2e; ", worst);
    if (worst > 1e-9) pass = false;
  }

  // kappa invariant under the common-factor toggles and a uniform rescale
  {
    const auto kappa_flags = [](bool z_flag, bool g_flag) {
      ExperimentSetup s = preset(PresetName::photon);
      s.include_z_factor = z_flag;
      s.include_global_prefactor = g_flag;
      const auto vs = validate(s);
      const KernelBundle b = kernel_bundle(vs, 0.0);
      return epsilon_full_from_bundle(b) / std::norm(b.k_total_of(SlitSubset::all(3)));
    };
    const double reference = kappa_flags(false, false);
    double worst = 0.0;
    for (bool z_flag : {false, true})
      for (bool g_flag : {false, true})
        worst = std::max(worst,
                         std::abs(kappa_flags(z_flag, g_flag) - reference) / std::abs(reference));

    const auto setup = validate(preset(PresetName::photon));
    KernelBundle b = kernel_bundle(setup, 0.0);
    const double plain = epsilon_full_from_bundle(b) / std::norm(b.k_total_of(SlitSubset::all(3)));
    for (auto& v : b.k1_single) v *= 7.0;
    for (auto& row : b.k2)
      for (auto& v : row) v *= 7.0;
    const double rescaled =
        epsilon_full_from_bundle(b) / std::norm(b.k_total_of(SlitSubset::all(3)));
    worst = std::max(worst, std::abs(rescaled - plain) / std::abs(plain));
    detail += fmt("toggle/rescale defect %.2e", worst);
    if (worst > 1e-12) pass = false;
  }
  return {pass, detail};
}

Outcome criterion_error_budget() {
  const auto setup = validate(preset(PresetName::photon));
  const ErrorBudget b = error_budget(setup);
  const auto within3 = [](double value, double expected) {
    return value / expected > 1.0 / 3.0 && value / expected < 3.0;
  };
  const bool pass = within3(b.metal_transmission_rel, 1.6119530426850823e-9) &&
                    within3(b.stationary_phase_rel, 2.1485917317405874e-6) &&
                    within3(b.fraunhofer_rel, 6.388888888888889e-4) &&
                    within3(b.kappa_rel_leading, 6.388888888888889e-4);
  return {pass, fmt("metal %.2e, stationary %.2e, Fraunhofer %.2e, leading %.2e",
                    b.metal_transmission_rel, b.stationary_phase_rel, b.fraunhofer_rel,
                    b.kappa_rel_leading)};
}

bool files_identical(const std::string& a, const std::string& b) {
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  if (!fa || !fb) return false;
  std::ostringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  return !sa.str().empty() && sa.str() == sb.str();
}

Outcome criterion_cli_determinism() {
#ifndef NCPATH_CLI_BIN
  return {false, "CLI binary path not configured"};
#else
  const std::string cli = NCPATH_CLI_BIN;
  const std::string args =
      " --preset photon --scan -1.5e-3 1.5e-3 21 --tolerance 1e-7 --format csv --out ";
  const int rc1 = std::system((cli + args + "acc_run1.csv > /dev/null 2>&1").c_str());
  const int rc2 = std::system((cli + args + "acc_run2.csv > /dev/null 2>&1").c_str());
  if (rc1 != 0 || rc2 != 0) return {false, fmt("CLI exit codes %d, %d", rc1, rc2)};
  const bool identical = files_identical("acc_run1.csv", "acc_run2.csv");

  // sidecar round trip: re-running from the recorded config reproduces the file
  const int rc3 = std::system(
      (cli + " --config acc_run1.csv.meta.json --out acc_run3.csv > /dev/null 2>&1").c_str());
  const bool roundtrip = rc3 == 0 && files_identical("acc_run1.csv", "acc_run3.csv");
  return {identical && roundtrip,
          fmt("byte-identical: %s, sidecar round-trip: %s", identical ? "yes" : "no",
              roundtrip ? "yes" : "no")};
#endif
}

Outcome criterion_electron_snapshot() {
  // Regression anchor, not a published value: the electron-preset kappa(0)
  // recorded at build time with rel_tolerance 4e-6 (the default tolerance
  // would need ~200k nodes per pair axis).
  const double frozen = -1.833946754e-09;
  QuadratureSpec spec;
  spec.rel_tolerance = 4e-6;
  const auto setup = validate(preset(PresetName::electron));
  const KernelBundle b = kernel_bundle(setup, 0.0, spec);
  const double kappa0 =
      epsilon_full_from_bundle(b) / std::norm(b.k_total_of(SlitSubset::all(3)));
  if (frozen == 0.0) {
    return {false, fmt("RECORD kappa(0) = %+.9e", kappa0)};
  }
  const double rel = std::abs(kappa0 - frozen) / std::abs(frozen);
  return {rel < 1e-3, fmt("kappa(0) = %+.6e vs recorded %+.6e (rel %.2e)", kappa0, frozen, rel)};
}

struct Criterion {
  int number;
  const char* name;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "photon preset kappa(0) window and timing", criterion_photon_window},
      {2, "microwave scenario kappa(0) window", criterion_microwave_window},
      {3, "wavelength monotonicity", criterion_wavelength_monotonicity},
      {4, "classical cancellation", criterion_classical_cancellation},
      {5, "linear-order consistency", criterion_linear_consistency},
      {6, "K1 additivity", criterion_k1_additivity},
      {7, "closed form vs sampled quadrature", criterion_fresnel_oracle},
      {8, "stationary-phase validity", criterion_stationary_phase_validity},
      {9, "Huygens composition", criterion_huygens},
      {10, "symmetry and invariance suite", criterion_symmetry_suite},
      {11, "error budget numerics", criterion_error_budget},
      {12, "CLI determinism", criterion_cli_determinism},
      {13, "electron preset regression snapshot", criterion_electron_snapshot},
  };

  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.number != only) continue;
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s  criterion %2d: %s — %s\n", outcome.pass ? "PASS" : "FAIL", c.number,
                c.name, outcome.detail.c_str());
    std::fflush(stdout);
    if (!outcome.pass) ++failures;
  }
  return failures;
}
