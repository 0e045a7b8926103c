#pragma once

// Finitely supported real couplings on the square lattice and the closed-form
// momentum profile used for the exchange amplitude. All couplings are required
// to be invariant under 90-degree rotations, (x,y) -> (-y,x); that symmetry
// makes every Fourier transform an exact finite cosine sum.

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "pairscope/errors.hpp"

namespace pairscope {

struct LatticeVector {
  int x = 0;
  int y = 0;

  friend bool operator==(const LatticeVector& a, const LatticeVector& b) {
    return a.x == b.x && a.y == b.y;
  }
  friend bool operator<(const LatticeVector& a, const LatticeVector& b) {
    return a.x != b.x ? a.x < b.x : a.y < b.y;
  }
};

// Rotation by 90 degrees: (x,y) -> (-y,x).
inline LatticeVector rotate90(LatticeVector v) { return {-v.y, v.x}; }

class LatticeCoupling {
 public:
  LatticeCoupling() = default;

  // Entries are stored sorted so iteration order is deterministic.
  static LatticeCoupling from_entries(std::vector<std::pair<LatticeVector, double>> entries);

  // Symmetrizes `seed` over the 4-element rotation orbit of each point;
  // convenient for building valid couplings in tests and configs.
  static LatticeCoupling symmetrized(const std::vector<std::pair<LatticeVector, double>>& seed);

  const std::vector<std::pair<LatticeVector, double>>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  double value(LatticeVector v) const;
  double sum_abs() const;
  // Mean support radius sum |z||c(z)| / sum |c(z)|; zero for the zero coupling.
  double mean_radius() const;
  bool supported_on_even_sublattice() const;
  bool has_point_outside_even_sublattice() const;
  bool is_multiple_of_delta0() const;

  // Exact rotation-invariance check over the whole (finite) support.
  bool is_rotation_invariant() const;
  void require_rotation_invariant(const char* label) const;

  // Fourier transform sum_x c(x) e^{i q.x}; real by reflection symmetry,
  // evaluated as the cosine sum.
  double fourier(double q1, double q2) const;
  // Gradient of the transform, (-sum c(x) x_j sin(q.x))_j.
  std::array<double, 2> fourier_gradient(double q1, double q2) const;

  LatticeCoupling scaled(double factor) const;

 private:
  std::vector<std::pair<LatticeVector, double>> entries_;
};

// Closed-form exchange amplitude in momentum space: two rational-in-cosine
// lobes peaked at (-pi,0) and (0,-pi), normalized so the value at either peak
// equals `peak_ev` exactly. Near (pi,0) it reduces to the local form
// peak / (alpha ((k1 - pi)^2 + k2^2) + 1) up to fourth order, and it is smooth
// and 90-degree-rotation invariant on the whole torus.
class MomentumProfile {
 public:
  MomentumProfile(double peak_ev, double alpha);

  double peak() const { return peak_ev_; }
  double alpha() const { return alpha_; }

  double operator()(double k1, double k2) const;
  std::array<double, 2> gradient(double k1, double k2) const;

  MomentumProfile with_peak(double peak_ev) const { return MomentumProfile(peak_ev, alpha_); }

 private:
  double peak_ev_;
  double alpha_;
  double center_value_;  // lobe-sum value at a peak, used for normalization
};

}  // namespace pairscope
