#pragma once

// Fiber ground states through the scalar characteristic equation
//   upsilon_hat(k)^2 T(U,k,x) + x - b(k) = 0,  x < z(k),
// solved by guarded bracketing plus a Newton polish (the slope is > 1
// everywhere below the essential spectrum).

#include <optional>
#include <vector>

#include "pairscope/fiber.hpp"

namespace pairscope {

struct PairState {
  double k1 = 0.0, k2 = 0.0;
  OnSite onsite = OnSite::finite(0.0);
  double energy = 0.0;          // E(U,k), eV
  double gap = 0.0;             // z(k) - E, eV
  double pair_fraction = 1.0;   // rho = 1 / (|psi|^2 + 1)
  GridFunction psi_hat;         // fermionic component, unnormalized; empty when exchange = 0
  double bosonic_amp = -1.0;
  double boson_energy = 0.0;
  double essential_bottom = 0.0;
  double exchange = 0.0;
  double residual = 0.0;        // |characteristic| at the returned energy
  bool degenerate_pair_shape = false;  // hard-core warning: r_p = 0
};

struct Characteristic {
  double value = 0.0;
  double slope = 0.0;  // exchange^2 |R d|^2 + 1 when requested
};

// Characteristic function value at x (< z(k)).
double eval_characteristic(const FiberOperator& op, double x);
Characteristic eval_characteristic_with_slope(const FiberOperator& op, double x);

// Ground-state solve on one fiber. Throws NO_ROOT when bracketing exhausts
// machine range; reports DEGENERATE_PAIR_SHAPE via the state flag.
PairState solve_ground_state(const ModelParams& params, const TorusGrid& grid, double k1, double k2,
                             OnSite onsite);
inline PairState solve_ground_state_hardcore(const ModelParams& params, const TorusGrid& grid,
                                             double k1, double k2) {
  return solve_ground_state(params, grid, k1, k2, OnSite::hardcore());
}

struct BirmanSchwingerReport {
  double value = 0.0;          // exchange^2 T / (b - lambda)
  double deviation = 0.0;      // |value - 1|
  bool certified = false;      // deviation below certification tolerance
};

// Scalar Birman-Schwinger eigenvalue at trial energy lambda; equal to one
// exactly at eigenvalues of the fiber operator.
BirmanSchwingerReport birman_schwinger_check(const ModelParams& params, const TorusGrid& grid,
                                             double k1, double k2, OnSite onsite, double lambda,
                                             double certify_tol = 1e-9);

struct GroundEnergy {
  double e_min = 0.0;
  double k1 = 0.0, k2 = 0.0;
};

// Minimum of the fiber ground-state energy over the given momenta
// (grid points when k_list is empty).
GroundEnergy ground_energy(const ModelParams& params, const TorusGrid& grid, OnSite onsite,
                           const std::vector<std::array<double, 2>>& k_list = {});

}  // namespace pairscope
