#pragma once

// Inversion of the pair fraction: fit the exchange-amplitude peak so that the
// fiber ground state at a reference momentum reaches a target pair fraction.

#include "pairscope/spectral.hpp"

namespace pairscope {

struct CalibrationResult {
  double target_rho = 0.0;
  double fitted_peak_ev = 0.0;
  int iterations = 0;
  double residual = 0.0;  // |rho(fitted) - target|
};

// One-dimensional root-find over the peak amplitude of the exchange profile.
// The profile shape is fixed; only its peak is scaled. The pair fraction is
// strictly decreasing in the peak, which is asserted on the bracketing scan.
CalibrationResult calibrate_upsilon(const ModelParams& params, const TorusGrid& grid, double k1,
                                    double k2, OnSite onsite, double target_rho, double tol = 1e-6);

}  // namespace pairscope
