#pragma once

// Uniform N x N discretization of the torus [-pi,pi)^2 with the normalized
// Haar measure (weight 1/N^2 per point). Grid functions are stored as length
// N^2 complex vectors indexed by idx = j1 * N + j2.

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "pairscope/couplings.hpp"
#include "pairscope/errors.hpp"

namespace pairscope {

using GridFunction = Eigen::VectorXcd;

// Wraps an angle into [-pi, pi).
double wrap_angle(double a);

class TorusGrid {
 public:
  explicit TorusGrid(int n);

  int n() const { return n_; }
  int size() const { return n_ * n_; }
  double weight() const { return 1.0 / static_cast<double>(size()); }

  double coord(int j) const { return coords_[static_cast<size_t>(j)]; }
  int index(int j1, int j2) const { return j1 * n_ + j2; }
  std::array<double, 2> point(int idx) const {
    return {coords_[static_cast<size_t>(idx / n_)], coords_[static_cast<size_t>(idx % n_)]};
  }

  // Index of the grid point closest to (k1,k2); exact for grid points.
  int nearest_index(double k1, double k2) const;
  bool contains(double k1, double k2, double tol = 1e-12) const;

  // Permutation implementing [Rquarter phi](k1,k2) = phi(k2,-k1):
  // the value of the rotated function at index i is phi[rotation_source(i)].
  int rotation_source(int idx) const;

  // Permutation implementing [S phi](p) = phi(-p - k) for a grid point k;
  // used for shift/reflection symmetries that close on the grid.
  int reflect_shift_source(int idx, int k_idx) const;

 private:
  int n_;
  std::vector<double> coords_;
};

std::complex<double> inner_product(const TorusGrid& grid, const GridFunction& a,
                                   const GridFunction& b);
double norm_sq(const TorusGrid& grid, const GridFunction& a);

// Plane wave e_x: values e^{i p.x} at each grid point; unit norm under the
// normalized Haar measure.
GridFunction plane_wave(const TorusGrid& grid, LatticeVector x);

GridFunction rotate_grid_function(const TorusGrid& grid, const GridFunction& phi);

// Real-space window map psi(x) for |x1|,|x2| <= w, from the quadrature sum
// psi(x) = (1/N^2) sum_p e^{-i p.x} phi(p).
class LatticeWindow {
 public:
  LatticeWindow(int w) : w_(w), values_(static_cast<size_t>((2 * w + 1) * (2 * w + 1))) {}

  int w() const { return w_; }
  int side() const { return 2 * w_ + 1; }
  std::complex<double>& at(int x, int y) {
    return values_[static_cast<size_t>((x + w_) * side() + (y + w_))];
  }
  const std::complex<double>& at(int x, int y) const {
    return values_[static_cast<size_t>((x + w_) * side() + (y + w_))];
  }

 private:
  int w_;
  std::vector<std::complex<double>> values_;
};

LatticeWindow to_lattice(const TorusGrid& grid, const GridFunction& phi, int w);

}  // namespace pairscope
