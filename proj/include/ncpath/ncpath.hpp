#pragma once

// Non-classical (looped) path amplitudes in multi-slit interference:
// propagator kernels, the Sorkin parameter kappa, and the analytic error
// budget, with closed-form Fresnel segments and phase-adaptive oscillatory
// quadrature underneath.

#include "ncpath/complex_erf.hpp"
#include "ncpath/error_budget.hpp"
#include "ncpath/errors.hpp"
#include "ncpath/experiment.hpp"
#include "ncpath/experiment_io.hpp"
#include "ncpath/kernels.hpp"
#include "ncpath/quadrature.hpp"
#include "ncpath/scan_io.hpp"
#include "ncpath/sorkin.hpp"
#include "ncpath/version.hpp"
