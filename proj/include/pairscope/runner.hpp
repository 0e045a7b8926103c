#pragma once

// High-level commands behind the C API and the CLI: each one loads nothing by
// itself (the model is passed in validated), runs the computation, writes the
// result files plus a manifest into the output directory, and returns a small
// summary.

#include <filesystem>

#include "pairscope/calibration.hpp"
#include "pairscope/io.hpp"
#include "pairscope/scattering.hpp"

namespace pairscope {

struct RunCommon {
  int grid_n = 64;
  int threads = 1;
  std::filesystem::path out_dir = ".";
};

struct FiberRunSummary {
  double energy = 0.0, gap = 0.0, rho = 0.0;
  double binding_kelvin_abs_e = 0.0;     // |E| / kB
  double binding_kelvin_gap = 0.0;       // (z - E) / kB
  double binding_kelvin_below_b = 0.0;   // (b - E) / kB
  std::vector<std::string> outputs;
};

FiberRunSummary run_fiber(const ModelParams& params, const RunCommon& common, double k1, double k2,
                          OnSite onsite, int density_window = 24);

struct SweepRunSummary {
  int fibers = 0;
  int cache_hits = 0;
  int failed = 0;
  double e_min = 0.0;
  double e_min_k1 = 0.0, e_min_k2 = 0.0;
  std::vector<std::string> outputs;
};

SweepRunSummary run_sweep(const ModelParams& params, const RunCommon& common, int k_density,
                          OnSite onsite);

struct LocalizeRunSummary {
  double xi_psi_a_nm = 0.0, xi_psi_b_nm = 0.0;
  double xi_density_a_nm = 0.0, xi_density_b_nm = 0.0;
  double extent_a_nm = 0.0, extent_b_nm = 0.0;
  bool certificate_holds = false;
  std::vector<std::string> outputs;
};

LocalizeRunSummary run_localize(const ModelParams& params, const RunCommon& common, double k1,
                                double k2, OnSite onsite, int window);

struct ScatterRunSummary {
  double unitarity_error = 0.0;
  double ode_vs_exact = 0.0;
  double dyson_vs_exact = 0.0;
  std::vector<std::string> outputs;
};

// Finite on-site only; the reference dynamics keeps the same repulsion so the
// exchange block is isolated.
ScatterRunSummary run_scatter(const ModelParams& params, const RunCommon& common, double k1,
                              double k2, double s, double t, int steps, int dyson_order,
                              int dyson_panels = 2, bool dump_matrices = false);

struct CalibrateRunSummary {
  double fitted_peak_ev = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::vector<std::string> outputs;
};

CalibrateRunSummary run_calibrate(const ModelParams& params, const RunCommon& common, double k1,
                                  double k2, OnSite onsite, double target_rho, double tol);

}  // namespace pairscope
