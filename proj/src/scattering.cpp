#include "pairscope/scattering.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

namespace pairscope {

namespace {

using Complex = std::complex<double>;
constexpr Complex kI{0.0, 1.0};

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& m) { return m.exp(); }

double op_norm(const Eigen::MatrixXcd& m) { return m.jacobiSvd().singularValues()(0); }

// 8-point Gauss-Legendre abscissas and weights on [-1, 1].
constexpr double kGlX[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                            -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                            0.7966664774136267,  0.9602898564975363};
constexpr double kGlW[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                            0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                            0.2223810344533745, 0.1012285362903763};

struct Node {
  double tau;
  double weight;
};

std::vector<Node> composite_gl(double lo, double hi, int panels) {
  std::vector<Node> nodes;
  nodes.reserve(static_cast<size_t>(8 * panels));
  const double span = (hi - lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * span;
    const double mid = a + 0.5 * span;
    const double half = 0.5 * span;
    for (int i = 0; i < 8; ++i) nodes.push_back({mid + half * kGlX[i], half * kGlW[i]});
  }
  return nodes;
}

}  // namespace

ScatteringFiber::ScatteringFiber(const ModelParams& params, const TorusGrid& grid, double k1,
                                 double k2, double u_ev) {
  FiberOperator op(params, grid, k1, k2, OnSite::finite(u_ev));
  n_ = grid.size();
  boson_energy_ = op.functions().boson_energy;
  exchange_ = op.functions().exchange;
  a11_ = op.dense_A11();
  shape_ = op.to_orthonormal(op.functions().pair_shape);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(a11_);
  if (es.info() != Eigen::Success)
    throw numerical_error("NO_ROOT", "fiber eigendecomposition failed");
  evecs_ = es.eigenvectors();
  evals_ = es.eigenvalues();
  shape_in_eigenbasis_ = evecs_.adjoint() * shape_;
}

Eigen::MatrixXcd ScatteringFiber::full() const {
  Eigen::MatrixXcd a(n_ + 1, n_ + 1);
  a.setZero();
  a.topLeftCorner(n_, n_) = a11_;
  a.block(0, n_, n_, 1) = exchange_ * shape_;
  a.block(n_, 0, 1, n_) = exchange_ * shape_.adjoint();
  a(n_, n_) = boson_energy_;
  return a;
}

Eigen::MatrixXcd ScatteringFiber::block_reference() const {
  Eigen::MatrixXcd x(n_ + 1, n_ + 1);
  x.setZero();
  x.topLeftCorner(n_, n_) = a11_;
  x(n_, n_) = boson_energy_;
  return x;
}

Eigen::MatrixXcd ScatteringFiber::exchange_block() const { return full() - block_reference(); }

Eigen::VectorXcd ScatteringFiber::evolve_a11(double t, const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd coeff = evecs_.adjoint() * v;
  for (int j = 0; j < coeff.size(); ++j) coeff[j] *= std::polar(1.0, t * evals_[j]);
  return evecs_ * coeff;
}

std::complex<double> ScatteringFiber::kernel(double t) const {
  Complex acc{0.0, 0.0};
  for (int j = 0; j < evals_.size(); ++j)
    acc += std::norm(shape_in_eigenbasis_[j]) * std::polar(1.0, t * evals_[j]);
  return acc;
}

Eigen::MatrixXcd interaction_picture_exact(const ScatteringFiber& fiber, double s, double t) {
  const int n = fiber.dim() - 1;
  const Eigen::MatrixXcd ext = expm((kI * t) * fiber.a11());
  const Eigen::MatrixXcd exs = expm((-kI * s) * fiber.a11());
  const Eigen::MatrixXcd mid = expm((kI * (s - t)) * fiber.full());
  Eigen::MatrixXcd left = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  Eigen::MatrixXcd right = Eigen::MatrixXcd::Zero(n + 1, n + 1);
  left.topLeftCorner(n, n) = ext;
  left(n, n) = std::polar(1.0, t * fiber.boson_energy());
  right.topLeftCorner(n, n) = exs;
  right(n, n) = std::polar(1.0, -s * fiber.boson_energy());
  return left * mid * right;
}

namespace {

// Action of Y_tau = e^{i tau X} Y e^{-i tau X}; Y is off-diagonal with a
// single column, so applying Y_tau to a matrix touches one row and one block.
struct RotatedExchange {
  const ScatteringFiber* fiber;

  Eigen::VectorXcd column(double tau) const {
    Eigen::VectorXcd w = fiber->evolve_a11(tau, fiber->exchange() * fiber->shape());
    return w * std::polar(1.0, -tau * fiber->boson_energy());
  }

  Eigen::MatrixXcd apply(const Eigen::VectorXcd& w, const Eigen::MatrixXcd& m) const {
    const int n = fiber->dim() - 1;
    Eigen::MatrixXcd out(n + 1, n + 1);
    out.topRows(n) = w * m.row(n);
    out.row(n) = w.adjoint() * m.topRows(n);
    return out;
  }
};

}  // namespace

PropagatorRecord propagate_ode(const ScatteringFiber& fiber, double s, double t, int steps,
                               bool with_oracle) {
  if (steps < 4) throw validation_error("VALIDATION_FAILED", "ODE propagation needs >= 4 steps");
  const int dim = fiber.dim();
  Eigen::MatrixXcd z = Eigen::MatrixXcd::Identity(dim, dim);
  const RotatedExchange rot{&fiber};
  const double h = (t - s) / steps;
  for (int step = 0; step < steps; ++step) {
    const double tau = s + step * h;
    const Eigen::VectorXcd w0 = rot.column(tau);
    const Eigen::VectorXcd wh = rot.column(tau + 0.5 * h);
    const Eigen::VectorXcd w1 = rot.column(tau + h);
    const Eigen::MatrixXcd k1 = -kI * rot.apply(w0, z);
    const Eigen::MatrixXcd k2 = -kI * rot.apply(wh, z + (0.5 * h) * k1);
    const Eigen::MatrixXcd k3 = -kI * rot.apply(wh, z + (0.5 * h) * k2);
    const Eigen::MatrixXcd k4 = -kI * rot.apply(w1, z + h * k3);
    z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  PropagatorRecord rec;
  rec.s = s;
  rec.t = t;
  rec.method = "ode(" + std::to_string(steps) + ")";
  rec.matrix = z;
  rec.unitarity_error = op_norm(z.adjoint() * z - Eigen::MatrixXcd::Identity(dim, dim));
  if (with_oracle) rec.oracle_error = op_norm(z - interaction_picture_exact(fiber, s, t));
  return rec;
}

namespace {

// A time-ordered chain integrand factorizes into e^{i sigma_l b tau_l} phases
// and scalar kernels kappa(tau_l - tau_{l-1}) coupling consecutive levels;
// fermion-side blocks carry the kernel on odd levels >= 3, boson-side blocks
// on even levels. Everything is evaluated in the A11 eigenbasis, where the
// evolved pair shape costs O(n) per node.
struct ChainSpec {
  int levels = 0;
  double lead_sign = -1.0;   // sign of the boson phase at level 1
  bool kappa_on_odd = true;  // kernel at odd levels >= 3 (else even levels)
};

class ChainIntegrator {
 public:
  enum class Kind { matrix, column, row, scalar };

  struct Result {
    Eigen::MatrixXcd matrix_eig;
    Eigen::VectorXcd col_eig;
    Eigen::RowVectorXcd row_eig;
    Complex scalar{0.0, 0.0};
  };

  ChainIntegrator(const ScatteringFiber& fiber, const Eigen::VectorXcd& shape_modes, double s,
                  int panels)
      : fiber_(fiber),
        shape_modes_(shape_modes),
        s_(s),
        panels_(panels),
        n_modes_(static_cast<int>(shape_modes.size())) {}

  Result run(const ChainSpec& spec, double t, Kind kind) {
    spec_ = spec;
    kind_ = kind;
    result_ = Result{};
    const auto top = composite_gl(s_, t, panels_);
    if (kind == Kind::matrix) {
      rows_.assign(top.size(), Eigen::RowVectorXcd::Zero(n_modes_));
      for (size_t a = 0; a < top.size(); ++a) {
        const Complex c = top[a].weight * phase(1, top[a].tau);
        descend(2, top[a].tau, top[a].tau, c, static_cast<int>(a));
      }
      result_.matrix_eig = Eigen::MatrixXcd::Zero(n_modes_, n_modes_);
      for (size_t a = 0; a < top.size(); ++a)
        result_.matrix_eig += mode_vector(top[a].tau) * rows_[a];
    } else if (kind == Kind::column) {
      result_.col_eig = Eigen::VectorXcd::Zero(n_modes_);
      for (const auto& node : top) {
        const Complex c = node.weight * phase(1, node.tau);
        col_head_ = mode_vector(node.tau);
        descend(2, node.tau, node.tau, c, -1);
      }
    } else {
      result_.row_eig = Eigen::RowVectorXcd::Zero(n_modes_);
      for (const auto& node : top) {
        const Complex c = node.weight * phase(1, node.tau);
        descend(2, node.tau, node.tau, c, -1);
      }
    }
    return result_;
  }

 private:
  Complex phase(int level, double tau) const {
    const double sign = (level % 2 == 1) ? spec_.lead_sign : -spec_.lead_sign;
    return std::polar(1.0, sign * fiber_.boson_energy() * tau);
  }

  bool kappa_at(int level) const {
    if (level < 2) return false;
    return spec_.kappa_on_odd ? (level % 2 == 1) : (level % 2 == 0);
  }

  Eigen::VectorXcd mode_vector(double tau) const {
    const auto& lam = fiber_.a11_eigenvalues();
    Eigen::VectorXcd v(n_modes_);
    for (int j = 0; j < n_modes_; ++j) v[j] = std::polar(1.0, tau * lam[j]) * shape_modes_[j];
    return v;
  }

  void terminate(double tau, const Complex& c, int top_index) {
    switch (kind_) {
      case Kind::matrix:
        rows_[static_cast<size_t>(top_index)] += c * mode_vector(tau).adjoint();
        break;
      case Kind::column:
        result_.col_eig += c * col_head_;
        break;
      case Kind::row:
        result_.row_eig += c * mode_vector(tau).adjoint();
        break;
      case Kind::scalar:
        result_.scalar += c;
        break;
    }
  }

  void descend(int level, double upper, double prev_tau, const Complex& carried, int top_index) {
    if (level > spec_.levels) {
      terminate(prev_tau, carried, top_index);
      return;
    }
    for (const auto& node : composite_gl(s_, upper, panels_)) {
      Complex c = carried * node.weight * phase(level, node.tau);
      if (kappa_at(level)) c *= fiber_.kernel(node.tau - prev_tau);
      descend(level + 1, node.tau, node.tau, c, top_index);
    }
  }

  const ScatteringFiber& fiber_;
  const Eigen::VectorXcd& shape_modes_;
  double s_;
  int panels_;
  int n_modes_;
  ChainSpec spec_;
  Kind kind_ = Kind::scalar;
  Result result_;
  std::vector<Eigen::RowVectorXcd> rows_;
  Eigen::VectorXcd col_head_;
};

}  // namespace

Eigen::MatrixXcd dyson_blocks(const ScatteringFiber& fiber, double s, double t, int order,
                              int panels) {
  if (order < 1) throw validation_error("VALIDATION_FAILED", "series order must be >= 1");
  if (order > 6) throw validation_error("VALIDATION_FAILED", "series order capped at 6");
  if (panels < 1) throw validation_error("VALIDATION_FAILED", "panel count must be >= 1");
  if (t < s) return dyson_blocks(fiber, t, s, order, panels).adjoint();

  const int n = fiber.dim() - 1;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(n + 1, n + 1);
  const double exch = fiber.exchange();
  if (exch == 0.0 || t == s) return out;

  const Eigen::MatrixXcd& v = fiber.a11_eigenvectors();
  const Eigen::VectorXcd& shape_modes = fiber.shape_modes();

  Eigen::MatrixXcd m11 = Eigen::MatrixXcd::Zero(n, n);
  Eigen::VectorXcd c12 = Eigen::VectorXcd::Zero(n);
  Eigen::RowVectorXcd r21 = Eigen::RowVectorXcd::Zero(n);
  Complex s22{0.0, 0.0};

  ChainIntegrator integ(fiber, shape_modes, s, panels);
  for (int levels = 1; levels <= order; ++levels) {
    const double magnitude = std::pow(exch, levels);
    if (levels % 2 == 0) {
      const int pairs = levels / 2;
      const double sign = (pairs % 2 == 0) ? 1.0 : -1.0;
      m11 += (sign * magnitude) *
             integ.run({levels, -1.0, true}, t, ChainIntegrator::Kind::matrix).matrix_eig;
      s22 += (sign * magnitude) *
             integ.run({levels, +1.0, false}, t, ChainIntegrator::Kind::scalar).scalar;
    } else {
      const int p = (levels - 1) / 2;
      const Complex coeff = -kI * ((p % 2 == 0) ? 1.0 : -1.0) * magnitude;
      c12 += coeff * integ.run({levels, -1.0, true}, t, ChainIntegrator::Kind::column).col_eig;
      r21 += coeff * integ.run({levels, +1.0, false}, t, ChainIntegrator::Kind::row).row_eig;
    }
  }

  out.topLeftCorner(n, n) += v * m11 * v.adjoint();
  out.block(0, n, n, 1) = v * c12;
  out.block(n, 0, 1, n) = r21 * v.adjoint();
  out(n, n) += s22;
  return out;
}

KernelCheck exchange_kernel_check(const ScatteringFiber& fiber, double s, double t) {
  KernelCheck check;
  const double exch = fiber.exchange();
  const double b = fiber.boson_energy();
  const Eigen::MatrixXcd e_minus_t = expm((-kI * t) * fiber.a11());
  const Eigen::MatrixXcd e_plus_s = expm((kI * s) * fiber.a11());
  const Eigen::RowVectorXcd row =
      (exch * std::polar(1.0, b * t)) * (fiber.shape().adjoint() * e_minus_t);
  const Eigen::VectorXcd col = std::polar(1.0, -b * s) * (e_plus_s * (exch * fiber.shape()));
  check.direct = (row * col)(0);
  check.formula = exch * exch * std::polar(1.0, b * (t - s)) * fiber.kernel(s - t);
  check.deviation = std::abs(check.direct - check.formula);
  return check;
}

UnboundReport unbound_channel_diagnostic(const ScatteringFiber& fiber,
                                         const Eigen::VectorXcd& probe_fermionic, double t_max) {
  const int n = fiber.dim() - 1;
  if (probe_fermionic.size() != n)
    throw validation_error("VALIDATION_FAILED", "probe must be a fermionic-sector vector");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(fiber.full());
  const Eigen::MatrixXcd& w = es.eigenvectors();
  const Eigen::VectorXd& lam = es.eigenvalues();
  auto evolve_full = [&](double t, const Eigen::VectorXcd& vec) {
    Eigen::VectorXcd c = w.adjoint() * vec;
    for (int j = 0; j < c.size(); ++j) c[j] *= std::polar(1.0, t * lam[j]);
    return (w * c).eval();
  };
  auto wave_at = [&](double t) {
    Eigen::VectorXcd staged(n + 1);
    staged.head(n) = fiber.evolve_a11(-t, probe_fermionic);
    staged(n) = 0.0;
    return evolve_full(t, staged);
  };

  UnboundReport report;
  constexpr int kRungs = 5;
  double horizon = t_max / std::pow(2.0, kRungs - 1);
  Eigen::VectorXcd current = wave_at(horizon);
  for (int r = 0; r < kRungs; ++r) {
    UnboundStep step;
    step.horizon = horizon;
    step.boson_leakage = std::abs(current(n));
    if (r + 1 < kRungs) {
      const Eigen::VectorXcd next = wave_at(2.0 * horizon);
      step.cauchy_increment = (next - current).norm();
      current = next;
      horizon *= 2.0;
    }
    report.steps.push_back(step);
  }
  return report;
}

double bound_channel_check(const ScatteringFiber& fiber, const PairState& state, double t) {
  const int n = fiber.dim() - 1;
  if (state.psi_hat.size() != n)
    throw validation_error("VALIDATION_FAILED", "pair state was solved on a different grid");
  Eigen::VectorXcd psi(n + 1);
  // Values to orthonormal coordinates: divide by N = sqrt(N^2).
  psi.head(n) = state.psi_hat / std::sqrt(static_cast<double>(n));
  psi(n) = state.bosonic_amp;
  const Eigen::MatrixXcd u = expm((kI * t) * fiber.full());
  const Eigen::VectorXcd evolved = u * psi;
  const Eigen::VectorXcd phased = std::polar(1.0, t * state.energy) * psi;
  return (evolved - phased).norm() / psi.norm();
}

}  // namespace pairscope
