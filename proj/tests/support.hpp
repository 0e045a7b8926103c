#pragma once

// Shared fixtures for the test suites: the prototypical parameter set, random
// rotation-invariant inputs, and small brute-force oracles kept independent of
// the library code paths they check.

#include <Eigen/Dense>
#include <complex>
#include <random>

#include "pairscope/constants.hpp"
#include "pairscope/fiber.hpp"
#include "pairscope/model.hpp"
#include "pairscope/torus_grid.hpp"

namespace testsupport {

using namespace pairscope;

// One-range pair shapes of the prototypical cuprate runs: p1 = 1 on |z| <= 1,
// p2 = 1 on the doubled points.
inline LatticeCoupling one_range_p1() {
  return LatticeCoupling::symmetrized({{{0, 0}, 1.0}, {{1, 0}, 1.0}});
}
inline LatticeCoupling one_range_p2() {
  return LatticeCoupling::symmetrized({{{0, 0}, 1.0}, {{2, 0}, 1.0}});
}

// Prototypical parameters; the documented default carries the
// nearest-neighbor screened repulsion u(z) = U/4 at |z| = 1.
inline ModelParams prototypical(bool nearest_neighbor_u = true) {
  ModelParams p;
  p.epsilon_ev = 0.266;
  p.h_b = 0.00575;
  p.onsite = OnSite::finite(1.461);
  p.p1 = one_range_p1();
  p.p2 = one_range_p2();
  if (nearest_neighbor_u) {
    p.u = LatticeCoupling::symmetrized({{{1, 0}, 1.461 / 4.0}});
    p.u_documentation = "u(z) = U/4 = 0.36525 eV at |z| = 1, 0 elsewhere";
  } else {
    p.u_documentation = "u = 0 (bare on-site repulsion only)";
  }
  p.upsilon = MomentumProfile(0.11, 1.0);
  p.lattice_spacing_nm = 0.2672;
  p.validate();
  return p;
}

inline LatticeCoupling random_coupling(std::mt19937_64& rng, int max_radius, double scale,
                                       bool nonnegative = false, bool even_support = false) {
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::uniform_int_distribution<int> coord(0, max_radius);
  std::vector<std::pair<LatticeVector, double>> seed;
  const int points = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < points; ++i) {
    int x = coord(rng), y = coord(rng);
    if (even_support) {
      x *= 2;
      y *= 2;
    }
    double v = scale * unif(rng);
    if (nonnegative) v = std::abs(v);
    if (v != 0.0) seed.push_back({{x, y}, v});
  }
  if (seed.empty()) seed.push_back({{0, 0}, scale});
  return LatticeCoupling::symmetrized(seed);
}

// Random model with finite couplings; always valid and in the bound-pair
// regime h_b <= 1/2.
inline ModelParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  ModelParams p;
  p.epsilon_ev = 0.1 + 0.9 * unif(rng);
  p.h_b = 0.5 * unif(rng);
  p.onsite = OnSite::finite(5.0 * p.epsilon_ev * unif(rng));
  p.u = random_coupling(rng, 1, 0.3 * p.epsilon_ev, /*nonnegative=*/true);
  p.p1 = random_coupling(rng, 1, 1.0);
  p.p2 = random_coupling(rng, 1, 1.0, false, /*even_support=*/true);
  if (p.p1.empty() && p.p2.empty()) p.p1 = one_range_p1();
  if (unif(rng) < 0.5)
    p.upsilon = MomentumProfile(0.05 + 0.2 * unif(rng), 0.5 + 2.0 * unif(rng));
  else
    p.upsilon = random_coupling(rng, 1, 0.2);
  p.validate();
  return p;
}

inline std::array<double, 2> random_grid_momentum(std::mt19937_64& rng, const TorusGrid& grid) {
  const int idx = static_cast<int>(rng() % static_cast<uint64_t>(grid.size()));
  return grid.point(idx);
}

// Dense lowest eigenvalue of the full fiber; the keystone oracle.
inline double dense_lowest_eigenvalue(const ModelParams& params, const TorusGrid& grid, double k1,
                                      double k2, OnSite onsite) {
  FiberOperator op(params, grid, k1, k2, onsite);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(op.dense_full());
  return es.eigenvalues()(0);
}

}  // namespace testsupport
