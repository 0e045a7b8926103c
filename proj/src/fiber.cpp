#include "pairscope/fiber.hpp"

#include <cmath>

#include "pairscope/constants.hpp"

namespace pairscope {

namespace {

// cos(q) on R^2 means cos q1 + cos q2 throughout this module.
double cos2(double q1, double q2) { return std::cos(q1) + std::cos(q2); }

}  // namespace

double boson_energy_at(const ModelParams& params, double k1, double k2) {
  return params.h_b * params.epsilon_ev * (2.0 - cos2(k1, k2));
}

double essential_bottom_at(const ModelParams& params, double k1, double k2) {
  // Half angles of the [-pi,pi) representative stay in [-pi/2, pi/2), where
  // the cosine is nonnegative, so no absolute values are needed.
  const double h1 = 0.5 * wrap_angle(k1);
  const double h2 = 0.5 * wrap_angle(k2);
  return params.epsilon_ev * (4.0 - 2.0 * cos2(h1, h2));
}

std::array<double, 2> essential_spectrum(const ModelParams& params, double k1, double k2) {
  const double z = essential_bottom_at(params, k1, k2);
  return {z, 8.0 * params.epsilon_ev - z};
}

FiberFunctions build_fiber_functions(const ModelParams& params, const TorusGrid& grid, double k1,
                                     double k2) {
  FiberFunctions f;
  f.k1 = wrap_angle(k1);
  f.k2 = wrap_angle(k2);
  f.boson_energy = boson_energy_at(params, k1, k2);
  f.essential_bottom = essential_bottom_at(params, k1, k2);
  f.exchange = eval_upsilon_hat(params, k1, k2);
  f.pair_kinetic.resize(grid.size());
  f.pair_shape.resize(grid.size());
  const double eps = params.epsilon_ev;
  f.epsilon = eps;
  double fmin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.size(); ++i) {
    const auto [p1c, p2c] = grid.point(i);
    const double val = eps * (4.0 - cos2(p1c + f.k1, p2c + f.k2) - cos2(p1c, p2c));
    f.pair_kinetic[i] = val;
    fmin = std::min(fmin, val);
    f.pair_shape[i] = eval_d(params, f.k1, f.k2, p1c, p2c);
  }
  f.min_kinetic = fmin;
  return f;
}

FiberOperator::FiberOperator(const ModelParams& params, const TorusGrid& grid, double k1,
                             double k2, OnSite onsite)
    : grid_(&grid), fns_(build_fiber_functions(params, grid, k1, k2)), onsite_(onsite) {
  for (const auto& [v, val] : params.u.entries())
    if (val != 0.0) u_terms_.push_back({v, val});
  all_terms_ = u_terms_;
  if (!onsite_.is_hardcore() && onsite_.value() > 0.0) {
    onsite_term_ = static_cast<int>(all_terms_.size());
    all_terms_.push_back({{0, 0}, onsite_.value()});
  }
  waves_.resize(grid.size(), static_cast<Eigen::Index>(all_terms_.size()) + 1);
  for (size_t j = 0; j < all_terms_.size(); ++j)
    waves_.col(static_cast<Eigen::Index>(j)) = plane_wave(grid, all_terms_[j].site);
  // Last column holds the constant mode, used by the hard-core solve.
  waves_.col(static_cast<Eigen::Index>(all_terms_.size())) = plane_wave(grid, {0, 0});
}

void FiberOperator::require_below_spectrum(double x) const {
  // Never clamp silently: points within 1e-12 eps of the diagonal pole fail.
  if (fns_.min_kinetic - x < 1e-12 * std::max(fns_.epsilon, 1e-9))
    throw numerical_error("SPECTRUM_PROXIMITY",
                          "resolvent point too close to the kinetic minimum: min f - x = " +
                              std::to_string(fns_.min_kinetic - x));
}

GridFunction FiberOperator::low_rank_solve(double x, const GridFunction& rhs,
                                           const std::vector<int>& term_selection) const {
  if (rhs.size() != grid_->size())
    throw validation_error("VALIDATION_FAILED", "resolvent right-hand side size mismatch");
  const Eigen::ArrayXd denom = fns_.pair_kinetic.array() - x;
  GridFunction base = (rhs.array() / denom).matrix();
  const int m = static_cast<int>(term_selection.size());
  if (m == 0) return base;

  // Capacitance system over the selected plane-wave projections:
  // (I + C S) g = r with S_ij = <e_i, D^-1 e_j>, r_i = <e_i, D^-1 rhs>.
  Eigen::MatrixXcd cap(m, m);
  Eigen::VectorXcd r(m);
  const double w = grid_->weight();
  for (int i = 0; i < m; ++i) {
    const auto ei = waves_.col(term_selection[static_cast<size_t>(i)]);
    r[i] = w * (ei.conjugate().array() * base.array()).sum();
    for (int j = 0; j < m; ++j) {
      const auto ej = waves_.col(term_selection[static_cast<size_t>(j)]);
      const double cj = all_terms_[static_cast<size_t>(term_selection[static_cast<size_t>(j)])].strength;
      const std::complex<double> sij =
          w * (ei.conjugate().array() * (ej.array() / denom)).sum();
      cap(i, j) = cj * sij + (i == j ? 1.0 : 0.0);
    }
  }
  const Eigen::VectorXcd g = cap.partialPivLu().solve(r);
  GridFunction out = base;
  for (int j = 0; j < m; ++j) {
    const auto ej = waves_.col(term_selection[static_cast<size_t>(j)]);
    const double cj = all_terms_[static_cast<size_t>(term_selection[static_cast<size_t>(j)])].strength;
    out -= (cj * g[j]) * (ej.array() / denom).matrix();
  }
  return out;
}

GridFunction FiberOperator::apply_resolvent_no_onsite(double x, const GridFunction& rhs) const {
  require_below_spectrum(x);
  std::vector<int> sel;
  for (size_t j = 0; j < u_terms_.size(); ++j) sel.push_back(static_cast<int>(j));
  return low_rank_solve(x, rhs, sel);
}

GridFunction FiberOperator::apply_resolvent(double x, const GridFunction& rhs) const {
  require_below_spectrum(x);
  if (!onsite_.is_hardcore()) {
    std::vector<int> sel;
    for (size_t j = 0; j < all_terms_.size(); ++j) sel.push_back(static_cast<int>(j));
    return low_rank_solve(x, rhs, sel);
  }
  // Hard core: limit of (B + U P0 - x)^-1 as U -> infinity,
  //   R_inf rhs = R_B rhs - <e0, R_B rhs> / <e0, R_B e0> * R_B e0,
  // which annihilates the on-site capacitance direction exactly.
  GridFunction y = apply_resolvent_no_onsite(x, rhs);
  const auto e0 = waves_.col(waves_.cols() - 1);
  GridFunction y0 = apply_resolvent_no_onsite(x, e0);
  const double w = grid_->weight();
  const std::complex<double> num = w * (e0.conjugate().array() * y.array()).sum();
  const std::complex<double> den = w * (e0.conjugate().array() * y0.array()).sum();
  return y - (num / den) * y0;
}

double FiberOperator::bs_form(double x) const {
  const GridFunction resolved = apply_resolvent(x, fns_.pair_shape);
  const std::complex<double> t = inner_product(*grid_, fns_.pair_shape, resolved);
  return t.real();
}

ResolventMoments FiberOperator::resolvent_moments(double x) const {
  ResolventMoments m;
  const auto s = waves_.col(waves_.cols() - 1);
  const GridFunction rs = apply_resolvent_no_onsite(x, s);
  const GridFunction rd = apply_resolvent_no_onsite(x, fns_.pair_shape);
  m.ss = inner_product(*grid_, s, rs).real();
  m.sd = inner_product(*grid_, s, rd);
  m.ds = inner_product(*grid_, fns_.pair_shape, rs);
  m.dd = inner_product(*grid_, fns_.pair_shape, rd).real();
  return m;
}

double FiberOperator::interpolation_residual(double x) const {
  if (onsite_.is_hardcore())
    throw validation_error("VALIDATION_FAILED",
                           "interpolation residual is a finite-on-site diagnostic");
  const double direct = bs_form(x);
  const ResolventMoments m = resolvent_moments(x);
  const double u = onsite_.value();
  const double denom = u * m.ss + 1.0;
  const double formula = m.dd / denom + u * (m.dd * m.ss - std::norm(m.sd)) / denom;
  return std::abs(direct - formula);
}

Eigen::MatrixXcd FiberOperator::dense_A11() const {
  if (onsite_.is_hardcore())
    throw validation_error("VALIDATION_FAILED", "no dense limit operator for the hard core");
  Eigen::MatrixXcd a = fns_.pair_kinetic.cast<std::complex<double>>().asDiagonal();
  const double w = grid_->weight();
  for (size_t j = 0; j < all_terms_.size(); ++j) {
    const auto ej = waves_.col(static_cast<Eigen::Index>(j));
    a += (all_terms_[j].strength * w) * (ej * ej.adjoint());
  }
  return a;
}

Eigen::MatrixXcd FiberOperator::dense_full() const {
  const int n = grid_->size();
  Eigen::MatrixXcd a(n + 1, n + 1);
  a.setZero();
  a.topLeftCorner(n, n) = dense_A11();
  // Couple through the orthonormalized fermion basis so the assembled matrix
  // is literally Hermitian: the boson column holds exchange * d(p) / N.
  const double invn = 1.0 / grid_->n();
  a.block(0, n, n, 1) = (fns_.exchange * invn) * fns_.pair_shape;
  a.block(n, 0, 1, n) = (fns_.exchange * invn) * fns_.pair_shape.adjoint();
  a(n, n) = fns_.boson_energy;
  return a;
}

Eigen::VectorXcd FiberOperator::to_orthonormal(const GridFunction& values) const {
  return values / static_cast<double>(grid_->n());
}

GridFunction FiberOperator::from_orthonormal(const Eigen::VectorXcd& coords) const {
  return coords * static_cast<double>(grid_->n());
}

}  // namespace pairscope
