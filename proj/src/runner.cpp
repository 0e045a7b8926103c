#include "pairscope/runner.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "pairscope/constants.hpp"
#include "pairscope/version.hpp"

namespace pairscope {

using nlohmann::json;

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest make_manifest(const ModelParams& params, const RunCommon& common, OnSite onsite) {
  RunManifest m;
  m.config_fingerprint = fingerprint(params);
  m.tool_version = kVersion;
  m.grid_n = common.grid_n;
  m.onsite = onsite.label();
  m.timestamp_utc = utc_timestamp();
  m.u_documentation = params.u_documentation;
  return m;
}

void finalize_manifest(const std::filesystem::path& out_dir, RunManifest manifest,
                       const std::vector<std::string>& outputs) {
  manifest.outputs = outputs;
  write_manifest(out_dir / "manifest.json", manifest);
}

void write_json_atomic(const std::filesystem::path& path, const json& j) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write '" + tmp.string() + "'");
    out << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

FiberRunSummary run_fiber(const ModelParams& params, const RunCommon& common, double k1, double k2,
                          OnSite onsite, int density_window) {
  std::filesystem::create_directories(common.out_dir);
  const TorusGrid grid(common.grid_n);
  const PairState state = solve_ground_state(params, grid, k1, k2, onsite);

  FiberRunSummary summary;
  summary.energy = state.energy;
  summary.gap = state.gap;
  summary.rho = state.pair_fraction;
  summary.binding_kelvin_abs_e = ev_to_kelvin(std::abs(state.energy));
  summary.binding_kelvin_gap = ev_to_kelvin(state.gap);
  summary.binding_kelvin_below_b = ev_to_kelvin(state.boson_energy - state.energy);

  json j = pair_state_to_json(state);
  // The binding-energy scale in kelvin admits three readings; all are
  // reported so downstream comparisons can state which one they use.
  j["binding_K"] = {{"abs_E", summary.binding_kelvin_abs_e},
                    {"z_minus_E", summary.binding_kelvin_gap},
                    {"b_minus_E", summary.binding_kelvin_below_b}};
  write_json_atomic(common.out_dir / "pair_state.json", j);
  summary.outputs.push_back("pair_state.json");

  if (state.psi_hat.size() > 0) {
    write_grid_function_csv(common.out_dir / "psi_hat.csv", grid, state.psi_hat);
    write_grid_function_bin(common.out_dir / "psi_hat.bin", grid, state.psi_hat);
    summary.outputs.push_back("psi_hat.csv");
    summary.outputs.push_back("psi_hat.bin");
    const int w = std::min(density_window, common.grid_n / 2);
    LatticeWindow psi = to_lattice(grid, state.psi_hat, w);
    double total = 0.0;
    for (int x = -w; x <= w; ++x)
      for (int y = -w; y <= w; ++y) total += std::norm(psi.at(x, y));
    LatticeWindow density(w);
    for (int x = -w; x <= w; ++x)
      for (int y = -w; y <= w; ++y) density.at(x, y) = std::norm(psi.at(x, y)) / total;
    write_density_csv(common.out_dir / "density.csv", density);
    summary.outputs.push_back("density.csv");
  }
  finalize_manifest(common.out_dir, make_manifest(params, common, onsite), summary.outputs);
  summary.outputs.push_back("manifest.json");
  return summary;
}

SweepRunSummary run_sweep(const ModelParams& params, const RunCommon& common, int k_density,
                          OnSite onsite) {
  std::filesystem::create_directories(common.out_dir);
  const TorusGrid grid(common.grid_n);
  const TorusGrid kgrid(k_density);
  const std::string fp = fingerprint(params);
  FiberCache cache(common.out_dir / "cache");

  SweepOptions options;
  options.threads = common.threads;

  DispersionTable table;
  table.grid_n = common.grid_n;
  table.onsite = onsite;
  table.params_fingerprint = fp;
  table.records.resize(static_cast<size_t>(kgrid.size()));

  // Cache pass first, then one parallel sweep over the misses.
  std::vector<int> missing;
  std::vector<std::string> keys(static_cast<size_t>(kgrid.size()));
  for (int i = 0; i < kgrid.size(); ++i) {
    const auto [k1, k2] = kgrid.point(i);
    keys[static_cast<size_t>(i)] = cache.key(fp, common.grid_n, onsite, k1, k2);
    if (auto rec = cache.load(keys[static_cast<size_t>(i)]))
      table.records[static_cast<size_t>(i)] = *rec;
    else
      missing.push_back(i);
  }
  if (!missing.empty()) {
    // Deterministic ordered fill; parallelism delegated to chunks.
    const int nthreads = std::max(1, common.threads);
    std::vector<std::thread> pool;
    std::atomic<size_t> cursor{0};
    auto work = [&]() {
      while (true) {
        const size_t at = cursor.fetch_add(1);
        if (at >= missing.size()) break;
        const int i = missing[at];
        const auto [k1, k2] = kgrid.point(i);
        table.records[static_cast<size_t>(i)] = sweep_fiber(params, grid, k1, k2, onsite, options);
      }
    };
    if (nthreads == 1) {
      work();
    } else {
      for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
      for (auto& th : pool) th.join();
    }
    for (int i : missing) cache.store(keys[static_cast<size_t>(i)], table.records[static_cast<size_t>(i)]);
  }

  SweepRunSummary summary;
  summary.fibers = kgrid.size();
  summary.cache_hits = cache.hits();
  bool first = true;
  for (const auto& r : table.records) {
    if (r.skipped || !r.error.empty()) {
      if (!r.error.empty()) ++summary.failed;
      continue;
    }
    if (first || r.energy < summary.e_min) {
      summary.e_min = r.energy;
      summary.e_min_k1 = r.k1;
      summary.e_min_k2 = r.k2;
      first = false;
    }
  }
  write_dispersion_csv(common.out_dir / "sweep.csv", table);
  write_json_atomic(common.out_dir / "sweep.json", dispersion_to_json(table));
  summary.outputs = {"sweep.csv", "sweep.json"};
  finalize_manifest(common.out_dir, make_manifest(params, common, onsite), summary.outputs);
  summary.outputs.push_back("manifest.json");
  return summary;
}

LocalizeRunSummary run_localize(const ModelParams& params, const RunCommon& common, double k1,
                                double k2, OnSite onsite, int window) {
  std::filesystem::create_directories(common.out_dir);
  const TorusGrid grid(common.grid_n);
  const RealSpacePair pair = real_space_pair(params, grid, k1, k2, onsite, window);

  LocalizeRunSummary summary;
  const double a_nm = pair.lattice_spacing_nm;
  // "a" is the tighter axis by convention.
  const bool axis1_tighter = pair.xi_psi_axis1 <= pair.xi_psi_axis2;
  summary.xi_psi_a_nm = a_nm * (axis1_tighter ? pair.xi_psi_axis1 : pair.xi_psi_axis2);
  summary.xi_psi_b_nm = a_nm * (axis1_tighter ? pair.xi_psi_axis2 : pair.xi_psi_axis1);
  summary.xi_density_a_nm = a_nm * (axis1_tighter ? pair.xi_density_axis1 : pair.xi_density_axis2);
  summary.xi_density_b_nm = a_nm * (axis1_tighter ? pair.xi_density_axis2 : pair.xi_density_axis1);
  summary.extent_a_nm = a_nm * std::min(pair.extent_axis1, pair.extent_axis2);
  summary.extent_b_nm = a_nm * std::max(pair.extent_axis1, pair.extent_axis2);
  summary.certificate_holds = pair.certificate.holds;

  write_density_csv(common.out_dir / "density.csv", pair.density);
  json j;
  j["k1"] = wrap_angle(k1);
  j["k2"] = wrap_angle(k2);
  j["U"] = onsite.label();
  j["window"] = pair.window;
  j["lattice_spacing_nm"] = a_nm;
  j["xi_psi_lattice"] = {pair.xi_psi_axis1, pair.xi_psi_axis2};
  j["xi_density_lattice"] = {pair.xi_density_axis1, pair.xi_density_axis2};
  j["extent_lattice"] = {pair.extent_axis1, pair.extent_axis2};
  j["xi_psi_nm"] = {summary.xi_psi_a_nm, summary.xi_psi_b_nm};
  j["xi_density_nm"] = {summary.xi_density_a_nm, summary.xi_density_b_nm};
  j["extent_nm"] = {summary.extent_a_nm, summary.extent_b_nm};
  j["combes_certificate"] = {{"alpha", pair.certificate.alpha},
                             {"C", pair.certificate.prefactor},
                             {"gap_min", pair.certificate.gap_min},
                             {"holds", pair.certificate.holds},
                             {"max_ratio", pair.certificate.max_ratio}};
  write_json_atomic(common.out_dir / "localization.json", j);
  summary.outputs = {"density.csv", "localization.json"};
  finalize_manifest(common.out_dir, make_manifest(params, common, onsite), summary.outputs);
  summary.outputs.push_back("manifest.json");
  return summary;
}

ScatterRunSummary run_scatter(const ModelParams& params, const RunCommon& common, double k1,
                              double k2, double s, double t, int steps, int dyson_order,
                              int dyson_panels, bool dump_matrices) {
  std::filesystem::create_directories(common.out_dir);
  if (params.onsite.is_hardcore())
    throw validation_error("VALIDATION_FAILED",
                           "scattering diagnostics need a finite on-site repulsion");
  const TorusGrid grid(common.grid_n);
  const ScatteringFiber fiber(params, grid, k1, k2, params.onsite.value());

  const Eigen::MatrixXcd exact = interaction_picture_exact(fiber, s, t);
  const PropagatorRecord ode = propagate_ode(fiber, s, t, steps, true);
  const Eigen::MatrixXcd dyson = dyson_blocks(fiber, s, t, dyson_order, dyson_panels);

  ScatterRunSummary summary;
  const Eigen::MatrixXcd gram =
      exact.adjoint() * exact - Eigen::MatrixXcd::Identity(fiber.dim(), fiber.dim());
  summary.unitarity_error = gram.jacobiSvd().singularValues()(0);
  summary.ode_vs_exact = ode.oracle_error;
  summary.dyson_vs_exact = (dyson - exact).jacobiSvd().singularValues()(0);

  json j;
  j["k1"] = wrap_angle(k1);
  j["k2"] = wrap_angle(k2);
  j["U_eV"] = params.onsite.value();
  j["s"] = s;
  j["t"] = t;
  j["steps"] = steps;
  j["dyson_order"] = dyson_order;
  j["unitarity_error"] = summary.unitarity_error;
  j["ode_vs_exact"] = summary.ode_vs_exact;
  j["dyson_vs_exact"] = summary.dyson_vs_exact;
  j["identity_propagator"] = fiber.exchange() == 0.0;
  write_json_atomic(common.out_dir / "propagator.json", j);
  summary.outputs = {"propagator.json"};
  if (dump_matrices) {
    write_matrix_bin(common.out_dir / "propagator_exact.bin", exact);
    write_matrix_bin(common.out_dir / "propagator_ode.bin", ode.matrix);
    summary.outputs.push_back("propagator_exact.bin");
    summary.outputs.push_back("propagator_ode.bin");
  }
  finalize_manifest(common.out_dir, make_manifest(params, common, params.onsite), summary.outputs);
  summary.outputs.push_back("manifest.json");
  return summary;
}

CalibrateRunSummary run_calibrate(const ModelParams& params, const RunCommon& common, double k1,
                                  double k2, OnSite onsite, double target_rho, double tol) {
  std::filesystem::create_directories(common.out_dir);
  const TorusGrid grid(common.grid_n);
  const CalibrationResult result = calibrate_upsilon(params, grid, k1, k2, onsite, target_rho, tol);

  CalibrateRunSummary summary;
  summary.fitted_peak_ev = result.fitted_peak_ev;
  summary.residual = result.residual;
  summary.iterations = result.iterations;

  json j;
  j["target_rho"] = result.target_rho;
  j["fitted_upsilon_peak_eV"] = result.fitted_peak_ev;
  j["iterations"] = result.iterations;
  j["residual"] = result.residual;
  j["k1"] = wrap_angle(k1);
  j["k2"] = wrap_angle(k2);
  j["U"] = onsite.label();
  write_json_atomic(common.out_dir / "calibration.json", j);
  summary.outputs = {"calibration.json"};
  finalize_manifest(common.out_dir, make_manifest(params, common, onsite), summary.outputs);
  summary.outputs.push_back("manifest.json");
  return summary;
}

}  // namespace pairscope
