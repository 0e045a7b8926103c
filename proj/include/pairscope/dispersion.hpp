#pragma once

// Brillouin-zone sweeps and per-fiber kinematics: analytic group velocities
// via implicit differentiation of the characteristic equation, finite
// difference mass tensors, pairing-symmetry weights, real-space densities and
// localization lengths, and constructive exponential-decay certificates.

#include <string>

#include "pairscope/constants.hpp"
#include "pairscope/spectral.hpp"

namespace pairscope {

struct SymWeights {
  double s = 0.0, d = 0.0, p = 0.0;
};

// Weights of the s/d/p parity sectors of the 90-degree rotation group,
// computed with the exact grid-point permutation.
SymWeights symmetry_decompose(const TorusGrid& grid, const GridFunction& psi_hat);

// Weight of the component odd under the grid-exact reflection p -> -p - k;
// a pair-centered parity diagnostic (small but nonzero away from the
// doubled-momentum symmetric set).
double reflect_shift_odd_weight(const TorusGrid& grid, const GridFunction& psi_hat, double k1,
                                double k2);

// Analytic group velocity at k != 0 (grid-exact; no finite differences).
std::array<double, 2> group_velocity(const ModelParams& params, const TorusGrid& grid, double k1,
                                     double k2, OnSite onsite);

struct MassTensorResult {
  double h11 = 0.0, h12 = 0.0, h22 = 0.0;  // symmetrized Hessian of E
  double m11 = 0.0, m12 = 0.0, m22 = 0.0;  // inverse Hessian
  double condition = 0.0;
  bool invertible = false;
};

MassTensorResult mass_tensor(const ModelParams& params, const TorusGrid& grid, double k1, double k2,
                             OnSite onsite, double step = 2.0 * kPi / 512.0);

struct SweepRecord {
  double k1 = 0.0, k2 = 0.0;
  bool skipped = false;        // singular fiber k = 0 with vanishing exchange
  std::string error;           // per-fiber failure; sweep continues
  double energy = 0.0, gap = 0.0, rho = 0.0;
  bool kinematics_ok = false;
  double v1 = 0.0, v2 = 0.0;
  bool mass_ok = false;
  double m11 = 0.0, m12 = 0.0, m22 = 0.0;
  SymWeights weights;
  bool has_weights = false;
};

struct DispersionTable {
  int grid_n = 0;
  OnSite onsite = OnSite::finite(0.0);
  std::string params_fingerprint;
  std::vector<SweepRecord> records;
};

struct SweepOptions {
  bool with_kinematics = true;
  int threads = 1;  // <= 1 means serial
  double mass_step = 2.0 * kPi / 512.0;
};

// Single sweep record; per-fiber failures are captured in the record.
SweepRecord sweep_fiber(const ModelParams& params, const TorusGrid& grid, double k1, double k2,
                        OnSite onsite, const SweepOptions& options = {});

// One record per momentum of `kgrid` (row-major over the momentum grid).
DispersionTable sweep(const ModelParams& params, const TorusGrid& grid, const TorusGrid& kgrid,
                      OnSite onsite, const SweepOptions& options = {});

struct CombesCertificate {
  double alpha = 0.0;
  double prefactor = 0.0;     // C in |psi(x)| <= C e^{-alpha |x|}
  double gap_min = 0.0;       // gap minimum used for the hypothesis
  bool gap_condition_ok = false;
  bool holds = false;         // pointwise verification over the window
  double max_ratio = 0.0;     // max |psi(x)| / (C e^{-alpha|x|})
};

struct RealSpacePair {
  int window = 0;
  LatticeWindow density;             // normalized |psi(x)|^2, sums to one
  // Log-linear least-squares decay lengths along the two lattice axes,
  // in lattice units, for |psi| and for the density |psi|^2.
  double xi_psi_axis1 = 0.0, xi_psi_axis2 = 0.0;
  double xi_density_axis1 = 0.0, xi_density_axis2 = 0.0;
  // Full widths (lattice units) where the density stays above 1e-3 of the
  // axis peak (the cloud size read off a density figure).
  double extent_axis1 = 0.0, extent_axis2 = 0.0;
  double lattice_spacing_nm = 0.0;
  CombesCertificate certificate;
};

RealSpacePair real_space_pair(const ModelParams& params, const TorusGrid& grid, double k1,
                              double k2, OnSite onsite, int window = 24);

// Gap minimum over a momentum grid in the hard-core limit; by monotonicity in
// the on-site repulsion this bounds the gap for every finite strength.
double gap_minimum(const ModelParams& params, const TorusGrid& grid, int k_samples = 17);

CombesCertificate combes_thomas_certificate(const ModelParams& params, const TorusGrid& grid,
                                            double k1, double k2, OnSite onsite, double alpha,
                                            int window = 24,
                                            std::optional<double> gap_min = std::nullopt);

// Largest decay rate allowed by the gap hypothesis 4 eps (e^alpha - 1) < g.
double certificate_alpha_limit(const ModelParams& params, double gap);

}  // namespace pairscope
