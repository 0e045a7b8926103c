#include "pairscope/calibration.hpp"

#include <cmath>

namespace pairscope {

namespace {

ModelParams with_exchange_amplitude(const ModelParams& params, double target_value, double k1,
                                    double k2) {
  ModelParams scaled = params;
  const double current = eval_upsilon_hat(params, k1, k2);
  if (current == 0.0)
    throw validation_error("VALIDATION_FAILED",
                           "calibration needs a nonvanishing exchange amplitude at the reference momentum");
  const double factor = target_value / current;
  if (const auto* prof = std::get_if<MomentumProfile>(&params.upsilon))
    scaled.upsilon = prof->with_peak(prof->peak() * factor);
  else
    scaled.upsilon = std::get<LatticeCoupling>(params.upsilon).scaled(factor);
  return scaled;
}

}  // namespace

CalibrationResult calibrate_upsilon(const ModelParams& params, const TorusGrid& grid, double k1,
                                    double k2, OnSite onsite, double target_rho, double tol) {
  if (!(target_rho > 0.0 && target_rho < 1.0))
    throw validation_error("VALIDATION_FAILED", "target pair fraction must lie in (0,1)");
  params.require_bound_pair_regime();

  auto rho_at = [&](double amplitude) {
    const ModelParams p = with_exchange_amplitude(params, amplitude, k1, k2);
    return solve_ground_state(p, grid, k1, k2, onsite).pair_fraction;
  };

  const double scale = std::max(params.epsilon_ev, 1e-9);
  const double amp_lo = 1e-4 * scale;
  const double amp_hi = 10.0 * scale;
  CalibrationResult result;
  result.target_rho = target_rho;

  // Geometric scan: locates the bracket and verifies that the pair fraction
  // decreases with the coupling before any root-finding is attempted.
  constexpr int kScan = 25;
  double prev_amp = amp_lo;
  double prev_rho = rho_at(amp_lo);
  result.iterations = 1;
  if (prev_rho < target_rho)
    throw numerical_error("TARGET_UNREACHABLE",
                          "pair fraction below target already at the smallest amplitude");
  double lo = amp_lo, hi = -1.0;
  for (int i = 1; i < kScan; ++i) {
    const double amp = amp_lo * std::pow(amp_hi / amp_lo, double(i) / (kScan - 1));
    const double rho = rho_at(amp);
    ++result.iterations;
    if (rho > prev_rho + 1e-12)
      throw numerical_error("TARGET_UNREACHABLE",
                            "pair fraction is not decreasing on the amplitude scan");
    if (rho >= target_rho) {
      lo = amp;
      prev_rho = rho;
      prev_amp = amp;
    } else {
      hi = amp;
      break;
    }
  }
  (void)prev_amp;
  if (hi < 0.0)
    throw numerical_error("TARGET_UNREACHABLE",
                          "pair fraction stays above target across the amplitude bounds");

  // Bisection on the monotone map amplitude -> rho.
  double rho_mid = prev_rho;
  double mid = lo;
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    rho_mid = rho_at(mid);
    ++result.iterations;
    if (std::abs(rho_mid - target_rho) < tol) break;
    if (rho_mid > target_rho)
      lo = mid;
    else
      hi = mid;
  }
  result.fitted_peak_ev = mid;
  result.residual = std::abs(rho_mid - target_rho);
  if (result.residual >= tol)
    throw numerical_error("TARGET_UNREACHABLE", "calibration did not reach the requested tolerance");
  return result;
}

}  // namespace pairscope
