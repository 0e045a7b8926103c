#include "pairscope/torus_grid.hpp"

#include <cmath>

#include "pairscope/constants.hpp"

namespace pairscope {

double wrap_angle(double a) {
  double w = std::fmod(a + kPi, 2.0 * kPi);
  if (w < 0.0) w += 2.0 * kPi;
  return w - kPi;
}

TorusGrid::TorusGrid(int n) : n_(n) {
  if (n < 4 || n % 2 != 0)
    throw validation_error("VALIDATION_FAILED", "grid size must be even and >= 4");
  coords_.resize(static_cast<size_t>(n));
  for (int j = 0; j < n; ++j) coords_[static_cast<size_t>(j)] = -kPi + 2.0 * kPi * j / n;
}

int TorusGrid::nearest_index(double k1, double k2) const {
  auto axis = [this](double k) {
    const double step = 2.0 * kPi / n_;
    long j = std::lround((wrap_angle(k) + kPi) / step);
    return static_cast<int>(((j % n_) + n_) % n_);
  };
  return index(axis(k1), axis(k2));
}

bool TorusGrid::contains(double k1, double k2, double tol) const {
  const auto [g1, g2] = point(nearest_index(k1, k2));
  return std::abs(wrap_angle(k1 - g1)) <= tol && std::abs(wrap_angle(k2 - g2)) <= tol;
}

int TorusGrid::rotation_source(int idx) const {
  // Value at point (x_a, x_b) comes from phi at (x_b, -x_a); the index of
  // -x_a is (n - a) mod n because -(-pi + 2 pi a / n) wraps back onto the grid.
  const int a = idx / n_;
  const int b = idx % n_;
  return index(b, (n_ - a) % n_);
}

int TorusGrid::reflect_shift_source(int idx, int k_idx) const {
  // [S phi](p) = phi(-p - k): the index of -x_a - x_ka is
  // (n - a - ka + n/2) mod n since -(-pi) folds to -pi + pi shifts of the
  // anchor; derived from -(2 coords + 2 pi (a + ka)/n) mod 2 pi.
  const int a = idx / n_, b = idx % n_;
  const int ka = k_idx / n_, kb = k_idx % n_;
  auto src = [this](int j, int kj) {
    // coord(j') = -coord(j) - coord(kj) mod 2 pi
    // -(-pi + 2 pi j/n) - (-pi + 2 pi kj/n) = 2 pi - 2 pi (j + kj)/n == -pi + 2 pi m/n
    // with m = n/2 - j - kj mod n.
    int m = (n_ / 2 - j - kj) % n_;
    if (m < 0) m += n_;
    return m;
  };
  return index(src(a, ka), src(b, kb));
}

std::complex<double> inner_product(const TorusGrid& grid, const GridFunction& a,
                                   const GridFunction& b) {
  if (a.size() != grid.size() || b.size() != grid.size())
    throw validation_error("VALIDATION_FAILED", "grid function size mismatch");
  std::complex<double> s{0.0, 0.0};
  for (int i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
  return s * grid.weight();
}

double norm_sq(const TorusGrid& grid, const GridFunction& a) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += std::norm(a[i]);
  return s * grid.weight();
}

GridFunction plane_wave(const TorusGrid& grid, LatticeVector x) {
  GridFunction f(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    const auto [p1, p2] = grid.point(i);
    const double phase = p1 * x.x + p2 * x.y;
    f[i] = std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return f;
}

GridFunction rotate_grid_function(const TorusGrid& grid, const GridFunction& phi) {
  if (phi.size() != grid.size())
    throw validation_error("VALIDATION_FAILED", "grid function size mismatch");
  GridFunction out(grid.size());
  for (int i = 0; i < grid.size(); ++i) out[i] = phi[grid.rotation_source(i)];
  return out;
}

LatticeWindow to_lattice(const TorusGrid& grid, const GridFunction& phi, int w) {
  if (phi.size() != grid.size())
    throw validation_error("VALIDATION_FAILED", "grid function size mismatch");
  if (w > grid.n() / 2)
    throw validation_error("VALIDATION_FAILED", "window half-width exceeds N/2");
  const int n = grid.n();
  const int side = 2 * w + 1;

  // Separable partial sums: g[j1][x2] = sum_{j2} e^{-i p_{j2} x2} phi(j1, j2).
  std::vector<std::complex<double>> partial(static_cast<size_t>(n) * side);
  for (int j1 = 0; j1 < n; ++j1) {
    for (int x2 = -w; x2 <= w; ++x2) {
      std::complex<double> acc{0.0, 0.0};
      for (int j2 = 0; j2 < n; ++j2) {
        const double p2 = grid.coord(j2);
        acc += std::polar(1.0, -p2 * x2) * phi[grid.index(j1, j2)];
      }
      partial[static_cast<size_t>(j1) * side + (x2 + w)] = acc;
    }
  }
  LatticeWindow out(w);
  const double weight = grid.weight();
  for (int x1 = -w; x1 <= w; ++x1) {
    for (int x2 = -w; x2 <= w; ++x2) {
      std::complex<double> acc{0.0, 0.0};
      for (int j1 = 0; j1 < n; ++j1) {
        const double p1 = grid.coord(j1);
        acc += std::polar(1.0, -p1 * x1) * partial[static_cast<size_t>(j1) * side + (x2 + w)];
      }
      out.at(x1, x2) = acc * weight;
    }
  }
  return out;
}

}  // namespace pairscope
