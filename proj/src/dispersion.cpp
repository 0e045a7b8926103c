#include "pairscope/dispersion.hpp"

#include <cmath>
#include <thread>

namespace pairscope {

SymWeights symmetry_decompose(const TorusGrid& grid, const GridFunction& psi_hat) {
  const double total = norm_sq(grid, psi_hat);
  if (total == 0.0)
    throw validation_error("VALIDATION_FAILED", "symmetry decomposition of the zero vector");
  // Powers of the quarter rotation; r4 is the identity for the exact
  // grid-point permutation.
  GridFunction r1 = rotate_grid_function(grid, psi_hat);
  GridFunction r2 = rotate_grid_function(grid, r1);
  GridFunction r3 = rotate_grid_function(grid, r2);
  const GridFunction s_part = 0.25 * (psi_hat + r1 + r2 + r3);
  const GridFunction d_part = 0.25 * (psi_hat - r1 + r2 - r3);
  const GridFunction p_part = 0.5 * (psi_hat - r2);
  SymWeights w;
  w.s = norm_sq(grid, s_part) / total;
  w.d = norm_sq(grid, d_part) / total;
  w.p = norm_sq(grid, p_part) / total;
  return w;
}

double reflect_shift_odd_weight(const TorusGrid& grid, const GridFunction& psi_hat, double k1,
                                double k2) {
  const double total = norm_sq(grid, psi_hat);
  if (total == 0.0)
    throw validation_error("VALIDATION_FAILED", "symmetry decomposition of the zero vector");
  if (!grid.contains(k1, k2))
    throw validation_error("VALIDATION_FAILED", "reflect-shift parity needs a grid momentum");
  const int k_idx = grid.nearest_index(k1, k2);
  GridFunction reflected(grid.size());
  for (int i = 0; i < grid.size(); ++i) reflected[i] = psi_hat[grid.reflect_shift_source(i, k_idx)];
  const GridFunction odd = 0.5 * (psi_hat - reflected);
  return norm_sq(grid, odd) / total;
}

std::array<double, 2> group_velocity(const ModelParams& params, const TorusGrid& grid, double k1,
                                     double k2, OnSite onsite) {
  const double w1 = wrap_angle(k1), w2 = wrap_angle(k2);
  if (w1 == 0.0 && w2 == 0.0)
    throw numerical_error("UNDEFINED_AT_SINGULAR", "group velocity is undefined at k = 0");
  const double eps = params.epsilon_ev;
  const double exch = eval_upsilon_hat(params, w1, w2);
  if (exch == 0.0) {
    // Uncoupled fiber: the dispersion is the free boson branch.
    return {params.h_b * eps * std::sin(w1), params.h_b * eps * std::sin(w2)};
  }

  const PairState state = solve_ground_state(params, grid, w1, w2, onsite);
  FiberOperator op(params, grid, w1, w2, onsite);
  const auto& fns = op.functions();
  const GridFunction y = op.apply_resolvent(state.energy, fns.pair_shape);
  const double t_value = inner_product(grid, fns.pair_shape, y).real();
  const double slope = exch * exch * norm_sq(grid, y) + 1.0;

  const auto grad_exch = eval_upsilon_hat_gradient(params, w1, w2);
  std::array<double, 2> v{};
  for (int j = 0; j < 2; ++j) {
    // dT/dk_j = -<y, (df/dk_j) y> + 2 Re <dd/dk_j, y> with y = (A11 - E)^-1 d.
    double quad = 0.0;
    std::complex<double> cross{0.0, 0.0};
    for (int i = 0; i < grid.size(); ++i) {
      const auto [p1c, p2c] = grid.point(i);
      const double df = eps * std::sin((j == 0 ? p1c + w1 : p2c + w2));
      quad += df * std::norm(y[i]);
      const auto g1 = params.p1.fourier_gradient(w1 + p1c, w2 + p2c);
      const auto g2 = params.p2.fourier_gradient(0.5 * w1 + p1c, 0.5 * w2 + p2c);
      const double dd = g1[static_cast<size_t>(j)] + 0.5 * g2[static_cast<size_t>(j)];
      cross += dd * y[i];
    }
    quad *= grid.weight();
    cross *= grid.weight();
    const double dT = -quad + 2.0 * cross.real();
    const double db = params.h_b * eps * (j == 0 ? std::sin(w1) : std::sin(w2));
    const double dPhi = 2.0 * exch * grad_exch[static_cast<size_t>(j)] * t_value +
                        exch * exch * dT - db;
    v[static_cast<size_t>(j)] = -dPhi / slope;
  }
  return v;
}

MassTensorResult mass_tensor(const ModelParams& params, const TorusGrid& grid, double k1,
                             double k2, OnSite onsite, double step) {
  const double w1 = wrap_angle(k1), w2 = wrap_angle(k2);
  if (w1 == 0.0 && w2 == 0.0)
    throw numerical_error("UNDEFINED_AT_SINGULAR", "mass tensor is undefined at k = 0");
  auto energy = [&](double a, double b) {
    return solve_ground_state(params, grid, a, b, onsite).energy;
  };
  const double e0 = energy(w1, w2);
  const double ep1 = energy(w1 + step, w2), em1 = energy(w1 - step, w2);
  const double ep2 = energy(w1, w2 + step), em2 = energy(w1, w2 - step);
  const double epp = energy(w1 + step, w2 + step), epm = energy(w1 + step, w2 - step);
  const double emp = energy(w1 - step, w2 + step), emm = energy(w1 - step, w2 - step);

  MassTensorResult r;
  const double h2 = step * step;
  r.h11 = (ep1 - 2.0 * e0 + em1) / h2;
  r.h22 = (ep2 - 2.0 * e0 + em2) / h2;
  r.h12 = (epp - epm - emp + emm) / (4.0 * h2);

  const double scale = std::max({std::abs(r.h11), std::abs(r.h22), std::abs(r.h12)});
  const double det = r.h11 * r.h22 - r.h12 * r.h12;
  if (scale == 0.0 || std::abs(det) < 1e-12 * scale * scale)
    throw numerical_error("SINGULAR_HESSIAN", "dispersion Hessian is numerically singular");
  r.m11 = r.h22 / det;
  r.m22 = r.h11 / det;
  r.m12 = -r.h12 / det;
  // Condition number of the symmetric 2x2 Hessian from its eigenvalues.
  const double tr = r.h11 + r.h22;
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  const double l1 = std::abs(0.5 * tr + disc), l2 = std::abs(0.5 * tr - disc);
  r.condition = (std::min(l1, l2) == 0.0) ? std::numeric_limits<double>::infinity()
                                          : std::max(l1, l2) / std::min(l1, l2);
  r.invertible = true;
  return r;
}

SweepRecord sweep_fiber(const ModelParams& params, const TorusGrid& grid, double k1, double k2,
                        OnSite onsite, const SweepOptions& options) {
  SweepRecord rec;
  rec.k1 = wrap_angle(k1);
  rec.k2 = wrap_angle(k2);
  const bool at_zero = rec.k1 == 0.0 && rec.k2 == 0.0;
  try {
    if (at_zero && eval_upsilon_hat(params, 0.0, 0.0) == 0.0) {
      rec.skipped = true;  // measure-zero singular fiber
      return rec;
    }
    const PairState state = solve_ground_state(params, grid, rec.k1, rec.k2, onsite);
    rec.energy = state.energy;
    rec.gap = state.gap;
    rec.rho = state.pair_fraction;
    if (state.psi_hat.size() > 0) {
      rec.weights = symmetry_decompose(grid, state.psi_hat);
      rec.has_weights = true;
    }
    if (options.with_kinematics && !at_zero) {
      const auto v = group_velocity(params, grid, rec.k1, rec.k2, onsite);
      rec.v1 = v[0];
      rec.v2 = v[1];
      rec.kinematics_ok = true;
      try {
        const MassTensorResult m = mass_tensor(params, grid, rec.k1, rec.k2, onsite, options.mass_step);
        rec.m11 = m.m11;
        rec.m12 = m.m12;
        rec.m22 = m.m22;
        rec.mass_ok = true;
      } catch (const Error& e) {
        if (e.name() != "SINGULAR_HESSIAN") throw;
      }
    }
  } catch (const Error& e) {
    rec.error = e.what();
  }
  return rec;
}

DispersionTable sweep(const ModelParams& params, const TorusGrid& grid, const TorusGrid& kgrid,
                      OnSite onsite, const SweepOptions& options) {
  params.require_bound_pair_regime();
  DispersionTable table;
  table.grid_n = grid.n();
  table.onsite = onsite;
  table.params_fingerprint = fingerprint(params);
  table.records.resize(static_cast<size_t>(kgrid.size()));

  const int nthreads = std::max(1, options.threads);
  auto work = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      const auto [k1, k2] = kgrid.point(i);
      table.records[static_cast<size_t>(i)] = sweep_fiber(params, grid, k1, k2, onsite, options);
    }
  };
  if (nthreads == 1) {
    work(0, kgrid.size());
  } else {
    std::vector<std::thread> pool;
    const int chunk = (kgrid.size() + nthreads - 1) / nthreads;
    for (int t = 0; t < nthreads; ++t) {
      const int begin = t * chunk;
      const int end = std::min(kgrid.size(), begin + chunk);
      if (begin < end) pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return table;
}

double gap_minimum(const ModelParams& params, const TorusGrid& grid, int k_samples) {
  // The fiber energy increases with the on-site repulsion, so the gap to the
  // essential spectrum attains its infimum in the hard-core limit; sampling
  // that limit bounds the whole ladder.
  double gmin = std::numeric_limits<double>::infinity();
  for (int a = 0; a < k_samples; ++a) {
    for (int b = 0; b < k_samples; ++b) {
      const double k1 = -kPi + 2.0 * kPi * a / k_samples;
      const double k2 = -kPi + 2.0 * kPi * b / k_samples;
      const PairState s = solve_ground_state(params, grid, k1, k2, OnSite::hardcore());
      gmin = std::min(gmin, s.gap);
    }
  }
  return gmin;
}

double certificate_alpha_limit(const ModelParams& params, double gap) {
  return std::log1p(gap / (4.0 * params.epsilon_ev));
}

CombesCertificate combes_thomas_certificate(const ModelParams& params, const TorusGrid& grid,
                                            double k1, double k2, OnSite onsite, double alpha,
                                            int window, std::optional<double> gap_min) {
  if (!(alpha > 0.0))
    throw validation_error("VALIDATION_FAILED", "certificate decay rate must be positive");
  CombesCertificate cert;
  cert.alpha = alpha;
  cert.gap_min = gap_min ? *gap_min : gap_minimum(params, grid);
  const double hop_spread = 4.0 * params.epsilon_ev * std::expm1(alpha);
  cert.gap_condition_ok = hop_spread < cert.gap_min;
  if (!cert.gap_condition_ok)
    throw numerical_error("GAP_CONDITION_FAILED",
                          "4 eps (e^alpha - 1) >= gap minimum; decrease alpha");

  double shape_sum = 0.0;
  for (const auto& [v, val] : params.p1.entries())
    shape_sum += std::abs(val) * std::exp(alpha * std::hypot(double(v.x), double(v.y)));
  for (const auto& [v, val] : params.p2.entries())
    shape_sum += std::abs(val) * std::exp(alpha * std::hypot(double(v.x), double(v.y)));
  const double exch = eval_upsilon_hat(params, k1, k2);
  cert.prefactor = std::abs(exch) * shape_sum / (cert.gap_min - hop_spread);

  const PairState state = solve_ground_state(params, grid, k1, k2, onsite);
  if (state.psi_hat.size() == 0) {
    cert.holds = true;  // zero fermionic component, vacuous bound
    cert.max_ratio = 0.0;
    return cert;
  }
  const LatticeWindow psi = to_lattice(grid, state.psi_hat, window);
  double worst = 0.0;
  for (int x = -window; x <= window; ++x) {
    for (int y = -window; y <= window; ++y) {
      const double bound = cert.prefactor * std::exp(-alpha * std::hypot(double(x), double(y)));
      worst = std::max(worst, std::abs(psi.at(x, y)) / bound);
    }
  }
  cert.max_ratio = worst;
  cert.holds = worst <= 1.0;
  return cert;
}

namespace {

struct AxisFit {
  double xi_psi = 0.0;
  double xi_density = 0.0;
  double extent = 0.0;
};

AxisFit fit_axis(const LatticeWindow& psi, int axis, double density_floor, double extent_frac) {
  const int w = psi.w();
  std::vector<double> radii, log_abs;
  double peak = std::norm(psi.at(0, 0));
  for (int t = -w; t <= w; ++t) {
    const auto v = axis == 0 ? psi.at(t, 0) : psi.at(0, t);
    peak = std::max(peak, std::norm(v));
  }
  int max_extent = 0;
  for (int t = -w; t <= w; ++t) {
    const auto v = axis == 0 ? psi.at(t, 0) : psi.at(0, t);
    const double dens = std::norm(v);
    if (dens > density_floor) {
      radii.push_back(std::abs(static_cast<double>(t)));
      log_abs.push_back(std::log(std::abs(v)));
    }
    if (dens >= extent_frac * peak) max_extent = std::max(max_extent, std::abs(t));
  }
  if (radii.size() < 4)
    throw validation_error("WINDOW_TOO_SMALL",
                           "fewer than 4 usable points for the axis decay fit; enlarge the window");
  // Least squares for log|psi| = a - r / xi.
  double sr = 0.0, sl = 0.0, srr = 0.0, srl = 0.0;
  const double n = static_cast<double>(radii.size());
  for (size_t i = 0; i < radii.size(); ++i) {
    sr += radii[i];
    sl += log_abs[i];
    srr += radii[i] * radii[i];
    srl += radii[i] * log_abs[i];
  }
  const double slope = (n * srl - sr * sl) / (n * srr - sr * sr);
  AxisFit fit;
  fit.xi_psi = slope < 0.0 ? -1.0 / slope : std::numeric_limits<double>::infinity();
  fit.xi_density = 0.5 * fit.xi_psi;  // |psi|^2 decays twice as fast
  fit.extent = 2.0 * max_extent + 1.0;
  return fit;
}

}  // namespace

RealSpacePair real_space_pair(const ModelParams& params, const TorusGrid& grid, double k1,
                              double k2, OnSite onsite, int window)
{
  const PairState state = solve_ground_state(params, grid, k1, k2, onsite);
  if (state.psi_hat.size() == 0)
    throw validation_error("VALIDATION_FAILED",
                           "real-space analysis needs a nonzero fermionic component");
  RealSpacePair out{window, LatticeWindow(window)};
  LatticeWindow psi = to_lattice(grid, state.psi_hat, window);

  double total = 0.0;
  for (int x = -window; x <= window; ++x)
    for (int y = -window; y <= window; ++y) total += std::norm(psi.at(x, y));
  if (total == 0.0) throw numerical_error("NO_ROOT", "vanishing real-space density");
  for (int x = -window; x <= window; ++x)
    for (int y = -window; y <= window; ++y)
      out.density.at(x, y) = std::norm(psi.at(x, y)) / total;

  const AxisFit fit1 = fit_axis(psi, 0, 1e-12 * total, 1e-3);
  const AxisFit fit2 = fit_axis(psi, 1, 1e-12 * total, 1e-3);
  out.xi_psi_axis1 = fit1.xi_psi;
  out.xi_psi_axis2 = fit2.xi_psi;
  out.xi_density_axis1 = fit1.xi_density;
  out.xi_density_axis2 = fit2.xi_density;
  out.extent_axis1 = fit1.extent;
  out.extent_axis2 = fit2.extent;
  out.lattice_spacing_nm = params.lattice_spacing_nm;

  // Fiber energies converge exponentially in the grid size, so the gap scan
  // runs on a capped grid regardless of the density grid.
  const TorusGrid gap_grid(std::min(grid.n(), 32));
  const double gmin = gap_minimum(params, gap_grid);
  const double alpha = 0.5 * certificate_alpha_limit(params, gmin);
  out.certificate =
      combes_thomas_certificate(params, grid, k1, k2, onsite, alpha, window, gmin);
  return out;
}

}  // namespace pairscope
