#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "ncpath/errors.hpp"

namespace ncpath {

/// Sentinel for "effectively infinite" slit half-height; the transverse
/// z-integral then takes its full Fresnel limit.
inline constexpr double kInfiniteHeight = std::numeric_limits<double>::infinity();

enum class Particle { photon, electron, other };

/// Slit layout on the plane x = 0. All lengths in meters.
struct SlitGeometry {
  std::vector<double> centers;  ///< slit center y-coordinates, strictly increasing
  double width = 0.0;           ///< common slit width w
  double height_half = kInfiniteHeight;  ///< half-height h, kInfiniteHeight allowed
};

struct BeamParameters {
  double wavenumber = 0.0;  ///< k = 2*pi/lambda, rad/m
  Particle particle_label = Particle::other;  ///< informational only

  double wavelength() const { return 2.0 * M_PI / wavenumber; }
};

/// Full physical configuration. Source sits at (-L, y_S, 0), detector plane
/// at x = D; the flags control the Kirchhoff 1/4 obliquity factor, the
/// common z-plane Fresnel factor C_z, and the global gamma prefactor (all of
/// which cancel out of kappa).
struct ExperimentSetup {
  SlitGeometry geometry;
  BeamParameters beam;
  double source_distance = 0.0;  ///< L
  double screen_distance = 0.0;  ///< D
  double source_offset = 0.0;    ///< y_S
  bool apply_inclination_factor = true;
  bool include_z_factor = false;
  bool include_global_prefactor = false;
};

/// Dimensionless ratios checked during validation. d_over_L drives the
/// Fraunhofer warning and feeds the error budget.
struct SetupDiagnostics {
  double d_over_L = 0.0;
  double lambda_over_w = 0.0;
  double lambda_over_L = 0.0;
  std::vector<std::string> warnings;
};

/// An ExperimentSetup that passed validate(). Immutable; all kernel and
/// Sorkin operations accept only this type. Safe to share across threads.
class ValidatedSetup {
public:
  const ExperimentSetup& setup() const { return setup_; }
  const SetupDiagnostics& diagnostics() const { return diag_; }

  const SlitGeometry& geometry() const { return setup_.geometry; }
  double wavenumber() const { return setup_.beam.wavenumber; }
  double source_distance() const { return setup_.source_distance; }
  double screen_distance() const { return setup_.screen_distance; }
  double source_offset() const { return setup_.source_offset; }
  int slit_count() const { return static_cast<int>(setup_.geometry.centers.size()); }
  double slit_center(int i) const { return setup_.geometry.centers.at(static_cast<std::size_t>(i)); }
  double slit_width() const { return setup_.geometry.width; }

  /// Centers mirror-symmetric about y = 0 and the source on axis.
  bool mirror_symmetric() const {
    if (setup_.source_offset != 0.0) return false;
    const auto& c = setup_.geometry.centers;
    const double scale = std::max(std::abs(c.front()), std::abs(c.back())) + setup_.geometry.width;
    const std::size_t n = c.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(c[i] + c[n - 1 - i]) > 1e-12 * scale) return false;
    }
    return true;
  }

private:
  friend ValidatedSetup validate(const ExperimentSetup&);
  ValidatedSetup(ExperimentSetup s, SetupDiagnostics d)
      : setup_(std::move(s)), diag_(std::move(d)) {}

  ExperimentSetup setup_;
  SetupDiagnostics diag_;
};

/// Checks geometry and beam invariants; returns the setup wrapped as
/// validated together with the diagnostic ratios {d/L, lambda/w, lambda/L}.
/// Fraunhofer marginality (d/L large) is a warning, never a failure.
inline ValidatedSetup validate(const ExperimentSetup& setup) {
  const auto& g = setup.geometry;
  if (g.centers.size() < 2 || g.centers.size() > 3)
    throw GeometryError("validate: need 2 or 3 slits, got " + std::to_string(g.centers.size()));
  for (std::size_t i = 0; i + 1 < g.centers.size(); ++i) {
    if (!(g.centers[i] < g.centers[i + 1]))
      throw GeometryError("validate: slit centers must be strictly increasing");
  }
  if (!(g.width > 0.0)) throw ConfigError("validate: slit width must be > 0");
  for (std::size_t i = 0; i + 1 < g.centers.size(); ++i) {
    if (!(g.centers[i + 1] - g.centers[i] > g.width))
      throw GeometryError("validate: slits overlap (gap " +
                          std::to_string(g.centers[i + 1] - g.centers[i]) + " <= width)");
  }
  if (!(g.height_half > 0.0))
    throw ConfigError("validate: slit half-height must be > 0 (or infinite)");
  if (!(setup.beam.wavenumber > 0.0)) throw ConfigError("validate: wavenumber must be > 0");
  if (!(setup.source_distance > 0.0)) throw ConfigError("validate: L must be > 0");
  if (!(setup.screen_distance > 0.0)) throw ConfigError("validate: D must be > 0");
  if (!std::isfinite(setup.source_offset))
    throw ConfigError("validate: source offset must be finite");

  const double k = setup.beam.wavenumber;
  const double lambda = 2.0 * M_PI / k;
  const double min_ld = std::min(setup.source_distance, setup.screen_distance);
  if (k * min_ld < 2.0 * M_PI)
    throw ConfigError("validate: wavelength exceeds the source/screen distance");

  double d_max = 0.0;
  for (double c : g.centers) d_max = std::max(d_max, std::abs(c));

  SetupDiagnostics diag;
  diag.d_over_L = d_max / min_ld;
  diag.lambda_over_w = lambda / g.width;
  diag.lambda_over_L = lambda / min_ld;
  if (diag.d_over_L > 0.01) {
    diag.warnings.push_back("Fraunhofer marginal: d/L = " + std::to_string(diag.d_over_L));
  }
  if (k * min_ld < 1e3) {
    diag.warnings.push_back("k*min(L,D) = " + std::to_string(k * min_ld) +
                            " is not deeply in the short-wavelength regime");
  }
  if (diag.lambda_over_w > 0.5) {
    diag.warnings.push_back("wavelength is not small against the slit width: lambda/w = " +
                            std::to_string(diag.lambda_over_w));
  }
  return ValidatedSetup(setup, std::move(diag));
}

enum class PresetName { photon, electron, microwave };

inline PresetName preset_name_from_string(const std::string& name) {
  if (name == "photon") return PresetName::photon;
  if (name == "electron") return PresetName::electron;
  if (name == "microwave") return PresetName::microwave;
  throw ConfigError("unknown preset '" + name + "' (expected photon|electron|microwave)");
}

inline const char* to_string(PresetName p) {
  switch (p) {
    case PresetName::photon: return "photon";
    case PresetName::electron: return "electron";
    default: return "microwave";
  }
}

/// Named triple-slit configurations with centers {-d, 0, +d}, on-axis source
/// and infinite slit height.
///
///   photon:    lambda 810 nm, w 30 um,  d 100 um, L = D = 18 cm
///   electron:  lambda 50 pm,  w 62 nm,  d 272 nm, L 30.5 cm, D 24 cm
///   microwave: lambda 4 cm,   w 1.2 m,  d 4 m,    L = D = 200 m
///
/// The microwave distances are this tool's assumption (the slit-corner
/// boundary waves of the two-crossing kernels interfere constructively
/// there, putting kappa(0) at its broad ~3e-4 plateau); they are echoed in
/// scan metadata.
inline ExperimentSetup preset(PresetName name) {
  ExperimentSetup s;
  double lambda = 0.0, d = 0.0;
  switch (name) {
    case PresetName::photon:
      lambda = 810e-9;
      d = 100e-6;
      s.geometry.width = 30e-6;
      s.source_distance = 0.18;
      s.screen_distance = 0.18;
      s.beam.particle_label = Particle::photon;
      break;
    case PresetName::electron:
      lambda = 50e-12;
      d = 272e-9;
      s.geometry.width = 62e-9;
      s.source_distance = 0.305;
      s.screen_distance = 0.24;
      s.beam.particle_label = Particle::electron;
      break;
    case PresetName::microwave:
      lambda = 0.04;
      d = 4.0;
      s.geometry.width = 1.2;
      s.source_distance = 200.0;
      s.screen_distance = 200.0;
      s.beam.particle_label = Particle::photon;
      break;
  }
  s.geometry.centers = {-d, 0.0, d};
  s.geometry.height_half = kInfiniteHeight;
  s.beam.wavenumber = 2.0 * M_PI / lambda;
  return s;
}

inline ExperimentSetup preset(const std::string& name) {
  return preset(preset_name_from_string(name));
}

}  // namespace ncpath
