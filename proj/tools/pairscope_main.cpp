// pairscope command-line tool. Thin argument layer over the C API; all
// computation and file writing happen behind the shared library boundary.
//
// Exit codes: 0 success, 2 validation failure, 3 numerical failure,
// 1 anything else (usage, I/O).

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "pairscope.h"

namespace {

// Momentum tokens accept plain numbers and multiples of pi: "pi", "-pi",
// "pi/2", "-3pi/4", "0.25".
double parse_momentum_token(const std::string& token) {
  const double pi = 3.14159265358979323846;
  std::string s = token;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw CLI::ValidationError("empty momentum component");
  const auto pos = s.find("pi");
  if (pos == std::string::npos) return std::stod(s);
  double factor = 1.0;
  const std::string pre = s.substr(0, pos);
  if (pre == "-")
    factor = -1.0;
  else if (!pre.empty() && pre != "+")
    factor = std::stod(pre);
  double divisor = 1.0;
  const std::string post = s.substr(pos + 2);
  if (!post.empty()) {
    if (post[0] != '/') throw CLI::ValidationError("bad momentum token '" + token + "'");
    divisor = std::stod(post.substr(1));
  }
  return factor * pi / divisor;
}

void parse_k(const std::string& spec, double& k1, double& k2) {
  const auto comma = spec.find(',');
  if (comma == std::string::npos)
    throw CLI::ValidationError("--k expects 'k1,k2' (e.g. \"-pi,0\")");
  k1 = parse_momentum_token(spec.substr(0, comma));
  k2 = parse_momentum_token(spec.substr(comma + 1));
}

int status_to_exit(ps_status status) {
  switch (status) {
    case PS_OK:
      return 0;
    case PS_ERR_VALIDATION:
      return 2;
    case PS_ERR_NUMERICAL:
      return 3;
    default:
      return 1;
  }
}

int fail(ps_status status) {
  std::fprintf(stderr, "error: %s\n", ps_last_error());
  return status_to_exit(status);
}

struct ModelHandle {
  ps_model* model = nullptr;
  ~ModelHandle() { ps_model_destroy(model); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dressed-bound-pair spectra, localization and scattering on the square lattice"};
  app.set_version_flag("--version", std::string(ps_version()));
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand

  std::string config_path;
  std::string out_dir = "out";
  int grid_n = 64;
  int threads = 1;
  app.add_option("--config", config_path, "model configuration file")->required();
  app.add_option("--grid-N", grid_n, "momentum grid points per axis (even)");
  app.add_option("--threads", threads, "worker threads for sweeps");
  app.add_option("--out-dir", out_dir, "output directory");

  std::string k_spec;
  std::string u_spec;

  auto* fiber = app.add_subcommand("fiber", "solve one fiber and emit state plus density");
  fiber->add_option("--k", k_spec, "total quasi-momentum 'k1,k2'")->required();
  fiber->add_option("--U", u_spec, "on-site repulsion in eV or 'hardcore' (default: config)");
  int fiber_window = 24;
  fiber->add_option("--window", fiber_window, "density window half-width");

  auto* sweepc = app.add_subcommand("sweep", "Brillouin-zone sweep with on-disk fiber cache");
  int k_density = 16;
  sweepc->add_option("--kdensity", k_density, "momentum grid points per axis (even)");
  sweepc->add_option("--U", u_spec, "on-site repulsion in eV or 'hardcore' (default: config)");

  auto* localize = app.add_subcommand("localize", "real-space pair density and decay lengths");
  localize->add_option("--k", k_spec, "total quasi-momentum 'k1,k2'")->required();
  localize->add_option("--U", u_spec, "on-site repulsion in eV or 'hardcore' (default: config)");
  int window = 24;
  localize->add_option("--window", window, "real-space window half-width");

  auto* scatter = app.add_subcommand("scatter", "finite-time propagator diagnostics (finite U)");
  scatter->add_option("--k", k_spec, "total quasi-momentum 'k1,k2'")->required();
  double t0 = 0.0, t1 = 1.0;
  int steps = 400, dyson_order = 4;
  scatter->add_option("--s", t0, "initial time (1/eV)");
  scatter->add_option("--t", t1, "final time (1/eV)");
  scatter->add_option("--steps", steps, "integrator steps");
  scatter->add_option("--order", dyson_order, "time-ordered series order (<= 6)");
  int dyson_panels = 2;
  bool dump_matrices = false;
  scatter->add_option("--panels", dyson_panels, "quadrature panels per series dimension");
  scatter->add_flag("--dump-matrices", dump_matrices, "write propagators as binary containers");

  auto* calibrate = app.add_subcommand("calibrate", "fit the exchange peak to a pair fraction");
  calibrate->add_option("--k", k_spec, "reference quasi-momentum 'k1,k2'")->required();
  calibrate->add_option("--U", u_spec, "on-site repulsion in eV or 'hardcore' (default: config)");
  double target_rho = 0.9, cal_tol = 1e-6;
  calibrate->add_option("--rho", target_rho, "target pair fraction in (0,1)");
  calibrate->add_option("--tol", cal_tol, "calibration tolerance on rho");

  CLI11_PARSE(app, argc, argv);

  ModelHandle handle;
  if (ps_status rc = ps_model_create_from_file(config_path.c_str(), &handle.model); rc != PS_OK)
    return fail(rc);

  ps_run_options options{};
  options.grid_n = grid_n;
  options.threads = threads;
  options.out_dir = out_dir.c_str();

  double k1 = 0.0, k2 = 0.0;
  double u_ev = 0.0;
  try {
    if (!k_spec.empty()) parse_k(k_spec, k1, k2);
    if (u_spec.empty()) {
      if (ps_status rc = ps_model_default_u(handle.model, &u_ev); rc != PS_OK) return fail(rc);
    } else if (u_spec == "hardcore") {
      u_ev = PS_U_HARDCORE;
    } else {
      u_ev = std::stod(u_spec);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  if (app.got_subcommand(fiber)) {
    ps_fiber_run_result result{};
    if (ps_status rc = ps_cmd_fiber(handle.model, &options, k1, k2, u_ev, fiber_window, &result); rc != PS_OK)
      return fail(rc);
    std::printf("E = %.10g eV   gap = %.10g eV   rho = %.6f\n", result.energy_ev, result.gap_ev,
                result.rho);
    std::printf("binding (K): |E| = %.6g   z-E = %.6g   b-E = %.6g\n",
                result.binding_kelvin_abs_e, result.binding_kelvin_gap,
                result.binding_kelvin_below_b);
    std::printf("outputs in %s\n", out_dir.c_str());
    return 0;
  }
  if (app.got_subcommand(sweepc)) {
    ps_sweep_run_result result{};
    if (ps_status rc = ps_cmd_sweep(handle.model, &options, k_density, u_ev, &result); rc != PS_OK)
      return fail(rc);
    std::printf("fibers = %d   cache hits = %d   failed = %d\n", result.fibers, result.cache_hits,
                result.failed);
    std::printf("min E = %.10g eV at k = (%.6f, %.6f)\n", result.e_min_ev, result.e_min_k1,
                result.e_min_k2);
    std::printf("outputs in %s\n", out_dir.c_str());
    return 0;
  }
  if (app.got_subcommand(localize)) {
    ps_localize_run_result result{};
    if (ps_status rc = ps_cmd_localize(handle.model, &options, k1, k2, u_ev, window, &result);
        rc != PS_OK)
      return fail(rc);
    std::printf("xi(|psi|)    = %.4f nm / %.4f nm\n", result.xi_psi_a_nm, result.xi_psi_b_nm);
    std::printf("xi(|psi|^2)  = %.4f nm / %.4f nm\n", result.xi_density_a_nm,
                result.xi_density_b_nm);
    std::printf("extent(1e-3) = %.4f nm / %.4f nm\n", result.extent_a_nm, result.extent_b_nm);
    std::printf("decay certificate: %s\n", result.certificate_holds ? "holds" : "FAILED");
    std::printf("outputs in %s\n", out_dir.c_str());
    return 0;
  }
  if (app.got_subcommand(scatter)) {
    ps_scatter_run_result result{};
    if (ps_status rc = ps_cmd_scatter(handle.model, &options, k1, k2, t0, t1, steps, dyson_order,
                                      dyson_panels, dump_matrices ? 1 : 0, &result);
        rc != PS_OK)
      return fail(rc);
    std::printf("unitarity error = %.3e\n", result.unitarity_error);
    std::printf("ode vs exact    = %.3e\n", result.ode_vs_exact);
    std::printf("dyson vs exact  = %.3e\n", result.dyson_vs_exact);
    std::printf("outputs in %s\n", out_dir.c_str());
    return 0;
  }
  if (app.got_subcommand(calibrate)) {
    ps_calibrate_run_result result{};
    if (ps_status rc =
            ps_cmd_calibrate(handle.model, &options, k1, k2, u_ev, target_rho, cal_tol, &result);
        rc != PS_OK)
      return fail(rc);
    std::printf("fitted peak = %.6g eV  (residual %.2e, %d iterations)\n", result.fitted_peak_ev,
                result.residual, result.iterations);
    std::printf("outputs in %s\n", out_dir.c_str());
    return 0;
  }
  return 1;
}
