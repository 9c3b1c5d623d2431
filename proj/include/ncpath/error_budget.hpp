#pragma once

#include <algorithm>
#include <cmath>

#include "ncpath/experiment.hpp"

namespace ncpath {

/// Opaque-material constants for the metal-transmission estimate.
/// Defaults are steel (refractive index 2.29 + 2.61i) at 1 um thickness.
struct MaterialDefaults {
  double attenuation = 2.61;  ///< alpha, imaginary part of the refractive index
  double thickness_m = 1e-6;  ///< mask thickness
};

/// The three leading relative-error estimates on the kernels and the
/// resulting leading relative error on kappa (their maximum).
struct ErrorBudget {
  double metal_transmission_rel = 0.0;
  double stationary_phase_rel = 0.0;
  double fraunhofer_rel = 0.0;
  double kappa_rel_leading = 0.0;
};

/// Amplitude leaking through the opaque mask: e^{-2 pi alpha zeta}, with zeta
/// the thickness in units of the wavelength.
inline double metal_transmission_error(double attenuation, double thickness_wavelengths) {
  if (!(attenuation > 0.0)) throw ConfigError("metal_transmission_error: attenuation must be > 0");
  if (!(thickness_wavelengths >= 0.0))
    throw ConfigError("metal_transmission_error: thickness must be >= 0");
  return std::exp(-2.0 * M_PI * attenuation * thickness_wavelengths);
}

/// Relative error of the stationary-phase reduction, |g4|/(g2^2 k) = 3/(L k).
inline double stationary_phase_error(const ValidatedSetup& setup) {
  return 3.0 / (setup.source_distance() * setup.wavenumber());
}

/// Relative error of the Fraunhofer phase expansion, d_max / min(L, D) with
/// d_max the outermost slit edge.
inline double fraunhofer_error(const ValidatedSetup& setup) {
  double d_max = 0.0;
  for (double c : setup.geometry().centers) d_max = std::max(d_max, std::abs(c));
  d_max += 0.5 * setup.slit_width();
  return d_max / std::min(setup.source_distance(), setup.screen_distance());
}

/// Assembles the three estimates; the leading kappa error is their maximum
/// (a single leading-order figure, not a quadrature sum).
inline ErrorBudget error_budget(const ValidatedSetup& setup,
                                const MaterialDefaults& material = {}) {
  ErrorBudget b;
  const double lambda = setup.setup().beam.wavelength();
  b.metal_transmission_rel =
      metal_transmission_error(material.attenuation, material.thickness_m / lambda);
  b.stationary_phase_rel = stationary_phase_error(setup);
  b.fraunhofer_rel = fraunhofer_error(setup);
  b.kappa_rel_leading =
      std::max({b.metal_transmission_rel, b.stationary_phase_rel, b.fraunhofer_rel});
  return b;
}

}  // namespace ncpath
