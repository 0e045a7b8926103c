#include "pairscope/couplings.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace pairscope {

LatticeCoupling LatticeCoupling::from_entries(
    std::vector<std::pair<LatticeVector, double>> entries) {
  std::map<LatticeVector, double> merged;
  for (const auto& [v, val] : entries) merged[v] += val;
  LatticeCoupling c;
  for (const auto& [v, val] : merged)
    if (val != 0.0) c.entries_.emplace_back(v, val);
  return c;
}

LatticeCoupling LatticeCoupling::symmetrized(
    const std::vector<std::pair<LatticeVector, double>>& seed) {
  std::map<LatticeVector, double> merged;
  for (const auto& [v, val] : seed) {
    LatticeVector w = v;
    for (int r = 0; r < 4; ++r) {
      merged[w] = val;  // orbit points share the seed value
      w = rotate90(w);
    }
  }
  LatticeCoupling c;
  for (const auto& [v, val] : merged)
    if (val != 0.0) c.entries_.emplace_back(v, val);
  return c;
}

double LatticeCoupling::value(LatticeVector v) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), v,
                             [](const auto& e, const LatticeVector& key) { return e.first < key; });
  if (it != entries_.end() && it->first == v) return it->second;
  return 0.0;
}

double LatticeCoupling::sum_abs() const {
  double s = 0.0;
  for (const auto& [v, val] : entries_) s += std::abs(val);
  return s;
}

double LatticeCoupling::mean_radius() const {
  double num = 0.0, den = 0.0;
  for (const auto& [v, val] : entries_) {
    const double r = std::hypot(static_cast<double>(v.x), static_cast<double>(v.y));
    num += r * std::abs(val);
    den += std::abs(val);
  }
  return den == 0.0 ? 0.0 : num / den;
}

bool LatticeCoupling::supported_on_even_sublattice() const {
  for (const auto& [v, val] : entries_)
    if ((v.x % 2 != 0 || v.y % 2 != 0) && val != 0.0) return false;
  return true;
}

bool LatticeCoupling::has_point_outside_even_sublattice() const {
  for (const auto& [v, val] : entries_)
    if ((v.x % 2 != 0 || v.y % 2 != 0) && val != 0.0) return true;
  return false;
}

bool LatticeCoupling::is_multiple_of_delta0() const {
  for (const auto& [v, val] : entries_)
    if (!(v.x == 0 && v.y == 0) && val != 0.0) return false;
  return true;
}

bool LatticeCoupling::is_rotation_invariant() const {
  for (const auto& [v, val] : entries_)
    if (value(rotate90(v)) != val) return false;
  return true;
}

void LatticeCoupling::require_rotation_invariant(const char* label) const {
  if (!is_rotation_invariant())
    throw validation_error("VALIDATION_FAILED",
                           std::string(label) + " is not 90-degree-rotation invariant");
}

double LatticeCoupling::fourier(double q1, double q2) const {
  // Rotation invariance implies c(-x) = c(x), so the sine parts cancel in
  // pairs and the full transform equals the cosine sum.
  double s = 0.0;
  for (const auto& [v, val] : entries_) s += val * std::cos(q1 * v.x + q2 * v.y);
  return s;
}

std::array<double, 2> LatticeCoupling::fourier_gradient(double q1, double q2) const {
  double g1 = 0.0, g2 = 0.0;
  for (const auto& [v, val] : entries_) {
    const double sn = std::sin(q1 * v.x + q2 * v.y);
    g1 -= val * v.x * sn;
    g2 -= val * v.y * sn;
  }
  return {g1, g2};
}

LatticeCoupling LatticeCoupling::scaled(double factor) const {
  LatticeCoupling c;
  c.entries_ = entries_;
  for (auto& [v, val] : c.entries_) val *= factor;
  return c;
}

namespace {

// Smooth periodic squared-distance surrogate vanishing at (pi,0) == (-pi,0):
// 2(1 + cos k1) + 2(1 - cos k2) ~ (k1 -+ pi)^2 + k2^2 near the zero. The
// companion lobe at (0,pi) uses the complementary expression; the two sum to
// the constant 8 on the whole torus.
double lobe_distance(double k1, double k2) { return 2.0 * (1.0 + std::cos(k1)) + 2.0 * (1.0 - std::cos(k2)); }

}  // namespace

MomentumProfile::MomentumProfile(double peak_ev, double alpha) : peak_ev_(peak_ev), alpha_(alpha) {
  if (!(alpha > 0.0))
    throw validation_error("VALIDATION_FAILED", "profile curvature alpha must be > 0");
  center_value_ = 1.0 + 1.0 / (8.0 * alpha_ + 1.0);
}

double MomentumProfile::operator()(double k1, double k2) const {
  const double d1 = lobe_distance(k1, k2);
  const double h = 1.0 / (alpha_ * d1 + 1.0) + 1.0 / (alpha_ * (8.0 - d1) + 1.0);
  return peak_ev_ * h / center_value_;
}

std::array<double, 2> MomentumProfile::gradient(double k1, double k2) const {
  const double d1 = lobe_distance(k1, k2);
  const double dd1_dk1 = -2.0 * std::sin(k1);
  const double dd1_dk2 = 2.0 * std::sin(k2);
  const double t1 = 1.0 / (alpha_ * d1 + 1.0);
  const double t2 = 1.0 / (alpha_ * (8.0 - d1) + 1.0);
  const double dh_dd1 = -alpha_ * t1 * t1 + alpha_ * t2 * t2;
  const double scale = peak_ev_ / center_value_;
  return {scale * dh_dd1 * dd1_dk1, scale * dh_dd1 * dd1_dk2};
}

}  // namespace pairscope
