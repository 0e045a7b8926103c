#pragma once

// Fiber operator at fixed total quasi-momentum k: a multiplication operator
// (the pair kinetic energy) plus a finite sum of rank-one plane-wave
// projections, coupled to a single bosonic amplitude. Resolvents are applied
// through the low-rank capacitance identity; dense assembly is kept as an
// oracle path for small grids.

#include <Eigen/Dense>
#include <optional>

#include "pairscope/model.hpp"
#include "pairscope/torus_grid.hpp"

namespace pairscope {

// Scalar fiber ingredients at momentum k.
struct FiberFunctions {
  double k1 = 0.0, k2 = 0.0;
  Eigen::VectorXd pair_kinetic;   // f_k on the grid, eV
  GridFunction pair_shape;        // d_k on the grid, dimensionless
  double boson_energy = 0.0;      // b(k), eV
  double essential_bottom = 0.0;  // z(k) = min ess spec, eV
  double exchange = 0.0;          // upsilon_hat(k), eV
  double min_kinetic = 0.0;       // min over grid of f_k >= z(k)
  double epsilon = 0.0;           // hopping scale, for tolerance scaling
};

FiberFunctions build_fiber_functions(const ModelParams& params, const TorusGrid& grid, double k1,
                                     double k2);

double boson_energy_at(const ModelParams& params, double k1, double k2);
double essential_bottom_at(const ModelParams& params, double k1, double k2);
// Essential spectrum of the fiber: [z(k), 8 eps - z(k)].
std::array<double, 2> essential_spectrum(const ModelParams& params, double k1, double k2);

struct RankOneTerm {
  LatticeVector site;
  double strength = 0.0;  // eV, >= 0
};

struct ResolventMoments {
  double ss = 0.0;                     // <s,(B-x)^-1 s>, strictly positive
  std::complex<double> sd{0.0, 0.0};   // <s,(B-x)^-1 d>
  std::complex<double> ds{0.0, 0.0};   // <d,(B-x)^-1 s> = conj(sd)
  double dd = 0.0;                     // <d,(B-x)^-1 d>
};

class FiberOperator {
 public:
  FiberOperator(const ModelParams& params, const TorusGrid& grid, double k1, double k2,
                OnSite onsite);

  const TorusGrid& grid() const { return *grid_; }
  const FiberFunctions& functions() const { return fns_; }
  const OnSite& onsite() const { return onsite_; }
  const std::vector<RankOneTerm>& extended_terms() const { return u_terms_; }

  // (A11 - x)^-1 rhs for x strictly below the kinetic minimum. For the
  // hard-core operator the on-site projection is removed exactly by a
  // constrained solve, not by a large finite coupling.
  GridFunction apply_resolvent(double x, const GridFunction& rhs) const;
  // Same, for the operator without the on-site term (B11).
  GridFunction apply_resolvent_no_onsite(double x, const GridFunction& rhs) const;

  // Birman-Schwinger form T(U,k,x) = <d,(A11 - x)^-1 d>; strictly positive.
  double bs_form(double x) const;
  // Resolvent moments of B11 between the constant mode and the pair shape.
  ResolventMoments resolvent_moments(double x) const;
  // |T computed directly - T from the moment formula|; the module's central
  // self-consistency diagnostic. Finite on-site only.
  double interpolation_residual(double x) const;

  // Dense oracle assembly in the orthonormalized basis (finite on-site only).
  Eigen::MatrixXcd dense_A11() const;
  Eigen::MatrixXcd dense_full() const;

  // Fermionic values vector -> orthonormal coordinates (divide by N) and back.
  Eigen::VectorXcd to_orthonormal(const GridFunction& values) const;
  GridFunction from_orthonormal(const Eigen::VectorXcd& coords) const;

 private:
  void require_below_spectrum(double x) const;
  // Woodbury solve of (diag + sum_j c_j P_j - x) psi = rhs over the given terms.
  GridFunction low_rank_solve(double x, const GridFunction& rhs,
                              const std::vector<int>& term_selection) const;

  const TorusGrid* grid_;
  FiberFunctions fns_;
  OnSite onsite_;
  std::vector<RankOneTerm> u_terms_;   // extended repulsion terms (no on-site)
  int onsite_term_ = -1;               // index into all_terms_ when finite U > 0
  std::vector<RankOneTerm> all_terms_; // u terms plus on-site when finite
  Eigen::MatrixXcd waves_;             // plane-wave columns for all_terms_
};

}  // namespace pairscope
