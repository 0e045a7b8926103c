/* pairscope.h - C interface to the dressed-bound-pair solver.
 *
 * The library computes spectral, localization and scattering diagnostics of a
 * two-fermion/one-boson exchange model on the square lattice, fiber by fiber
 * in total quasi-momentum. All state lives behind opaque handles; every call
 * returns a status code and the last error message is kept per thread.
 *
 * Momenta are given in radians in [-pi, pi)^2, energies in eV, times in 1/eV
 * (hbar = 1). The hard-core on-site limit is selected with PS_U_HARDCORE.
 */

#ifndef PAIRSCOPE_H
#define PAIRSCOPE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ps_status {
  PS_OK = 0,
  PS_ERR_INVALID_ARGUMENT = 1,
  PS_ERR_VALIDATION = 2,
  PS_ERR_NUMERICAL = 3,
  PS_ERR_IO = 4,
  PS_ERR_INTERNAL = 5
} ps_status;

/* Sentinel on-site repulsion selecting the hard-core limit. */
#define PS_U_HARDCORE (-1.0)

typedef struct ps_model ps_model;

const char* ps_version(void);
/* Message for the last failing call on this thread; never NULL. */
const char* ps_last_error(void);

/* eV <-> K conversions with the fixed Boltzmann constant. */
double ps_ev_to_kelvin(double ev);
double ps_kelvin_to_ev(double kelvin);

/* Model lifecycle. Creation validates the parameters (rotation invariance,
 * sign constraints, sublattice support) and fails with PS_ERR_VALIDATION. */
ps_status ps_model_create_from_file(const char* path, ps_model** out);
ps_status ps_model_create_from_string(const char* text, ps_model** out);
void ps_model_destroy(ps_model* model);

/* Hex fingerprint of the canonical parameter serialization. */
ps_status ps_model_fingerprint(const ps_model* model, char* buf, size_t buflen);
/* On-site repulsion from the config (PS_U_HARDCORE in the hard-core case). */
ps_status ps_model_default_u(const ps_model* model, double* u_ev);
/* Nondegeneracy check of the pair-shape form factor. */
ps_status ps_model_check_nondegeneracy(const ps_model* model);

typedef struct ps_pair_state {
  double k1, k2;
  double u_ev; /* PS_U_HARDCORE in the hard-core limit */
  double energy_ev;
  double gap_ev;
  double rho;
  double boson_energy_ev;
  double essential_bottom_ev;
  double upsilon_hat_ev;
  double w_s, w_d, w_p; /* pairing-symmetry weights; zero when undefined */
  int has_weights;
  int degenerate_pair_shape;
} ps_pair_state;

/* Ground state of one fiber on an N x N grid. */
ps_status ps_fiber_solve(const ps_model* model, int grid_n, double k1, double k2, double u_ev,
                         ps_pair_state* out);

typedef struct ps_kinematics {
  double v1, v2;
  double m11, m12, m22;
  int mass_ok;
} ps_kinematics;

/* Analytic group velocity and finite-difference mass tensor at k != 0. */
ps_status ps_fiber_kinematics(const ps_model* model, int grid_n, double k1, double k2, double u_ev,
                              ps_kinematics* out);

/* Essential spectrum interval of the fiber. */
ps_status ps_essential_spectrum(const ps_model* model, double k1, double k2, double* lo,
                                double* hi);

typedef struct ps_run_options {
  int grid_n;          /* points per axis, even, >= 4 */
  int threads;         /* <= 1 means serial */
  const char* out_dir; /* directory for result files; created if missing */
} ps_run_options;

typedef struct ps_fiber_run_result {
  double energy_ev, gap_ev, rho;
  double binding_kelvin_abs_e;   /* |E| / kB      */
  double binding_kelvin_gap;     /* (z - E) / kB  */
  double binding_kelvin_below_b; /* (b - E) / kB  */
} ps_fiber_run_result;

/* density_window <= 0 selects the default half-width of 24. */
ps_status ps_cmd_fiber(const ps_model* model, const ps_run_options* options, double k1, double k2,
                       double u_ev, int density_window, ps_fiber_run_result* out);

typedef struct ps_sweep_run_result {
  int fibers;
  int cache_hits;
  int failed;
  double e_min_ev;
  double e_min_k1, e_min_k2;
} ps_sweep_run_result;

/* Brillouin-zone sweep over a k_density x k_density momentum grid; fiber
 * results are cached on disk keyed by (fingerprint, N, U, k). */
ps_status ps_cmd_sweep(const ps_model* model, const ps_run_options* options, int k_density,
                       double u_ev, ps_sweep_run_result* out);

typedef struct ps_localize_run_result {
  double xi_psi_a_nm, xi_psi_b_nm;         /* decay lengths of |psi| */
  double xi_density_a_nm, xi_density_b_nm; /* decay lengths of |psi|^2 */
  double extent_a_nm, extent_b_nm;         /* widths above 1e-4 of peak */
  int certificate_holds;
} ps_localize_run_result;

ps_status ps_cmd_localize(const ps_model* model, const ps_run_options* options, double k1,
                          double k2, double u_ev, int window, ps_localize_run_result* out);

typedef struct ps_scatter_run_result {
  double unitarity_error;
  double ode_vs_exact;
  double dyson_vs_exact;
} ps_scatter_run_result;

/* Finite on-site repulsion only (the config's U); s, t in 1/eV. Set
 * dump_matrices to also write the propagators into binary containers. */
ps_status ps_cmd_scatter(const ps_model* model, const ps_run_options* options, double k1,
                         double k2, double s, double t, int steps, int dyson_order,
                         int dyson_panels, int dump_matrices, ps_scatter_run_result* out);

typedef struct ps_calibrate_run_result {
  double fitted_peak_ev;
  double residual;
  int iterations;
} ps_calibrate_run_result;

ps_status ps_cmd_calibrate(const ps_model* model, const ps_run_options* options, double k1,
                           double k2, double u_ev, double target_rho, double tol,
                           ps_calibrate_run_result* out);

#ifdef __cplusplus
}
#endif

#endif /* PAIRSCOPE_H */
