#pragma once

// Finite-time scattering diagnostics on a single fiber. The reference
// dynamics splits the fiber operator into its block-diagonal part X (fermion
// pair with the same repulsion, plus the free boson) and the off-diagonal
// exchange part Y; the interaction-picture propagator
//   V_{t,s} = e^{itX} e^{i(s-t)(X+Y)} e^{-isX}
// is computed three ways: exactly through dense matrix exponentials, by
// integrating the non-autonomous equation dZ/dt = -i Y_t Z, and by the
// truncated time-ordered series with the rank-one exchange kernel.

#include <Eigen/Dense>

#include "pairscope/spectral.hpp"

namespace pairscope {

// Dense fiber assembly plus the spectral data used by the fast propagators.
class ScatteringFiber {
 public:
  ScatteringFiber(const ModelParams& params, const TorusGrid& grid, double k1, double k2,
                  double u_ev);

  int dim() const { return n_ + 1; }  // fermionic modes + bosonic amplitude
  double boson_energy() const { return boson_energy_; }
  double exchange() const { return exchange_; }
  const Eigen::MatrixXcd& a11() const { return a11_; }
  Eigen::MatrixXcd full() const;            // X + Y
  Eigen::MatrixXcd block_reference() const; // X = A11 (+) b
  Eigen::MatrixXcd exchange_block() const;  // Y, off-diagonal

  // e^{i t A11} v through the cached eigendecomposition.
  Eigen::VectorXcd evolve_a11(double t, const Eigen::VectorXcd& v) const;
  // Scalar kernel kappa(t) = <d, e^{i t A11} d> under the fiber inner product.
  std::complex<double> kernel(double t) const;
  // Pair-shape vector in orthonormal coordinates.
  const Eigen::VectorXcd& shape() const { return shape_; }

  const Eigen::VectorXd& a11_eigenvalues() const { return evals_; }
  const Eigen::MatrixXcd& a11_eigenvectors() const { return evecs_; }
  const Eigen::VectorXcd& shape_modes() const { return shape_in_eigenbasis_; }

 private:
  int n_;
  double boson_energy_;
  double exchange_;
  Eigen::MatrixXcd a11_;
  Eigen::VectorXcd shape_;
  Eigen::MatrixXcd evecs_;
  Eigen::VectorXd evals_;
  Eigen::VectorXcd shape_in_eigenbasis_;
};

struct PropagatorRecord {
  double k1 = 0.0, k2 = 0.0;
  double u_ev = 0.0;
  double s = 0.0, t = 0.0;
  std::string method;          // "exact", "ode(steps)", "dyson(order)"
  Eigen::MatrixXcd matrix;
  double unitarity_error = 0.0;
  double oracle_error = -1.0;  // vs the exact propagator when computed
};

// Exact interaction-picture propagator via scaling-and-squaring exponentials.
Eigen::MatrixXcd interaction_picture_exact(const ScatteringFiber& fiber, double s, double t);

// Classical fourth-order one-step integration of dZ/dt = -i Y_t Z.
PropagatorRecord propagate_ode(const ScatteringFiber& fiber, double s, double t, int steps,
                               bool with_oracle = true);

// Truncated time-ordered series up to the given total order (<= 6), nested
// composite Gauss-Legendre with 8 nodes per panel per dimension.
Eigen::MatrixXcd dyson_blocks(const ScatteringFiber& fiber, double s, double t, int order,
                              int panels = 2);

// Scalar two-path check of the product kernel
//   B21^(t) B12^(s) = exchange^2 e^{i(t-s)b} <d, e^{i(s-t)A11} d>.
struct KernelCheck {
  std::complex<double> direct;   // from the assembled exponentials
  std::complex<double> formula;  // from the closed form
  double deviation = 0.0;
};
KernelCheck exchange_kernel_check(const ScatteringFiber& fiber, double s, double t);

struct UnboundStep {
  double horizon = 0.0;        // T
  double cauchy_increment = 0.0;  // ||(W(2T) - W(T)) phi||
  double boson_leakage = 0.0;     // bosonic component of W(T) phi
};

struct UnboundReport {
  std::vector<UnboundStep> steps;  // geometric ladder up to T_max
};

// Applies W(T) = e^{iTA} e^{-iTX} to a fermionic probe vector along a
// geometric time ladder. Convergence is reported, never asserted: the grid
// has pure point spectrum, so only the finite-time approach is meaningful.
UnboundReport unbound_channel_diagnostic(const ScatteringFiber& fiber,
                                         const Eigen::VectorXcd& probe_fermionic, double t_max);

// Bound-channel intertwining residual || e^{itA} Psi - e^{itE} Psi || / ||Psi||
// for a solved pair state, via the dense matrix exponential.
double bound_channel_check(const ScatteringFiber& fiber, const PairState& state, double t);

}  // namespace pairscope
