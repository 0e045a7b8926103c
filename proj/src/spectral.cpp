#include "pairscope/spectral.hpp"

#include <cmath>

namespace pairscope {

namespace {

double characteristic_from_T(const FiberFunctions& fns, double t_value, double x) {
  return fns.exchange * fns.exchange * t_value + x - fns.boson_energy;
}

}  // namespace

double eval_characteristic(const FiberOperator& op, double x) {
  const auto& fns = op.functions();
  if (fns.exchange == 0.0) return x - fns.boson_energy;
  return characteristic_from_T(fns, op.bs_form(x), x);
}

Characteristic eval_characteristic_with_slope(const FiberOperator& op, double x) {
  Characteristic c;
  const auto& fns = op.functions();
  if (fns.exchange == 0.0) {
    c.value = x - fns.boson_energy;
    c.slope = 1.0;
    return c;
  }
  const GridFunction y = op.apply_resolvent(x, fns.pair_shape);
  const double t_value = inner_product(op.grid(), fns.pair_shape, y).real();
  c.value = characteristic_from_T(fns, t_value, x);
  c.slope = fns.exchange * fns.exchange * norm_sq(op.grid(), y) + 1.0;
  return c;
}

PairState solve_ground_state(const ModelParams& params, const TorusGrid& grid, double k1,
                             double k2, OnSite onsite) {
  params.require_bound_pair_regime();
  FiberOperator op(params, grid, k1, k2, onsite);
  const auto& fns = op.functions();

  PairState state;
  state.k1 = fns.k1;
  state.k2 = fns.k2;
  state.onsite = onsite;
  state.boson_energy = fns.boson_energy;
  state.essential_bottom = fns.essential_bottom;
  state.exchange = fns.exchange;

  auto finish_with_boson_branch = [&]() {
    state.energy = fns.boson_energy;
    state.gap = fns.essential_bottom - state.energy;
    state.pair_fraction = 1.0;
    state.psi_hat.resize(0);
    state.residual = 0.0;
    return state;
  };

  if (fns.exchange == 0.0) return finish_with_boson_branch();
  if (onsite.is_hardcore() && params.r_p() == 0.0) {
    // Pure on-site pair shape: the hard core removes the exchange channel and
    // the eigenvalue merges with the boson branch.
    state.degenerate_pair_shape = true;
    return finish_with_boson_branch();
  }

  const double scale = std::max(params.epsilon_ev, 1e-9);
  const double upper_limit = std::min(fns.boson_energy, fns.essential_bottom);

  // A rounding-level exchange amplitude (an exact symmetry zero evaluated in
  // floating point) shifts the root by less than one ulp of the boson branch;
  // return that branch rather than chase an unresolvable bracket.
  const double exchange_shift =
      fns.exchange * fns.exchange * op.bs_form(upper_limit - 1e-6 * scale);
  if (exchange_shift < 1e-20 * scale) return finish_with_boson_branch();

  // Upper bracket: the characteristic is positive just below min(b, z);
  // shrink the offset until that is seen numerically.
  double delta = 1e-6 * scale;
  double x_hi = upper_limit - delta;
  double phi_hi = eval_characteristic(op, x_hi);
  while (phi_hi <= 0.0) {
    delta *= 0.125;
    if (delta < 1e-18 * scale)
      throw numerical_error("NO_ROOT", "upper bracket collapsed while scanning the characteristic");
    x_hi = upper_limit - delta;
    phi_hi = eval_characteristic(op, x_hi);
  }

  // Lower bracket: the characteristic tends to -infinity.
  double step = scale;
  double x_lo = x_hi - step;
  double phi_lo = eval_characteristic(op, x_lo);
  while (phi_lo >= 0.0) {
    step *= 2.0;
    if (step > 1e12 * scale)
      throw numerical_error("NO_ROOT", "no sign change found below the essential spectrum");
    x_lo = x_hi - step;
    phi_lo = eval_characteristic(op, x_lo);
  }

  // Bisection to a narrow bracket, then Newton with the analytic slope
  // (safe: the slope exceeds one everywhere below the essential spectrum).
  while (x_hi - x_lo > 1e-8 * scale) {
    const double mid = 0.5 * (x_lo + x_hi);
    if (eval_characteristic(op, mid) > 0.0)
      x_hi = mid;
    else
      x_lo = mid;
  }
  double x = 0.5 * (x_lo + x_hi);
  double residual = 0.0;
  for (int iter = 0; iter < 100; ++iter) {
    const Characteristic c = eval_characteristic_with_slope(op, x);
    residual = std::abs(c.value);
    if (residual < 1e-12 * scale) break;
    double next = x - c.value / c.slope;
    if (next <= x_lo || next >= x_hi) next = 0.5 * (x_lo + x_hi);
    if (c.value > 0.0)
      x_hi = x;
    else
      x_lo = x;
    x = next;
  }

  state.energy = x;
  state.gap = fns.essential_bottom - x;
  state.residual = residual;
  state.psi_hat = fns.exchange * op.apply_resolvent(x, fns.pair_shape);
  state.pair_fraction = 1.0 / (norm_sq(grid, state.psi_hat) + 1.0);
  return state;
}

BirmanSchwingerReport birman_schwinger_check(const ModelParams& params, const TorusGrid& grid,
                                             double k1, double k2, OnSite onsite, double lambda,
                                             double certify_tol) {
  FiberOperator op(params, grid, k1, k2, onsite);
  const auto& fns = op.functions();
  if (fns.exchange == 0.0)
    throw validation_error("VALIDATION_FAILED",
                           "Birman-Schwinger check needs a nonvanishing exchange amplitude");
  if (!(lambda < fns.essential_bottom))
    throw validation_error("VALIDATION_FAILED", "trial energy must lie below the essential spectrum");
  const double scale = std::max(params.epsilon_ev, 1e-9);
  if (std::abs(fns.boson_energy - lambda) < 1e-15 * scale)
    throw numerical_error("DIVISION_AT_B", "trial energy coincides with the boson branch");
  BirmanSchwingerReport report;
  report.value = fns.exchange * fns.exchange * op.bs_form(lambda) / (fns.boson_energy - lambda);
  report.deviation = std::abs(report.value - 1.0);
  report.certified = report.deviation < certify_tol;
  return report;
}

GroundEnergy ground_energy(const ModelParams& params, const TorusGrid& grid, OnSite onsite,
                           const std::vector<std::array<double, 2>>& k_list) {
  params.require_bound_pair_regime();
  GroundEnergy result;
  bool first = true;
  auto consider = [&](double k1, double k2) {
    const PairState s = solve_ground_state(params, grid, k1, k2, onsite);
    if (first || s.energy < result.e_min) {
      result.e_min = s.energy;
      result.k1 = s.k1;
      result.k2 = s.k2;
      first = false;
    }
  };
  if (k_list.empty()) {
    for (int i = 0; i < grid.size(); ++i) {
      const auto [k1, k2] = grid.point(i);
      consider(k1, k2);
    }
  } else {
    for (const auto& k : k_list) consider(k[0], k[1]);
  }
  if (eval_upsilon_hat(params, 0.0, 0.0) != 0.0 && params.r_p() > 0.0 &&
      result.e_min > 1e-12 * std::max(params.epsilon_ev, 1e-9))
    throw numerical_error("NO_ROOT", "ground energy expected to be <= 0 with coupled zero fiber");
  return result;
}

}  // namespace pairscope
