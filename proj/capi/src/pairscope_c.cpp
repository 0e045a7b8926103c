// extern-C shim over the C++ core: opaque handles, status codes, thread-local
// error text. No computation lives here.

#include "pairscope.h"

#include <cstring>
#include <memory>
#include <string>

#include "pairscope/constants.hpp"
#include "pairscope/runner.hpp"
#include "pairscope/version.hpp"

struct ps_model {
  pairscope::ModelParams params;
};

namespace {

thread_local std::string g_last_error;

ps_status to_status(const pairscope::Error& e) {
  switch (e.kind()) {
    case pairscope::ErrorKind::validation:
      return PS_ERR_VALIDATION;
    case pairscope::ErrorKind::numerical:
      return PS_ERR_NUMERICAL;
    case pairscope::ErrorKind::io:
      return PS_ERR_IO;
  }
  return PS_ERR_INTERNAL;
}

template <typename Fn>
ps_status guarded(Fn&& fn) {
  try {
    fn();
    return PS_OK;
  } catch (const pairscope::Error& e) {
    g_last_error = e.what();
    return to_status(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PS_ERR_INTERNAL;
  }
}

pairscope::OnSite onsite_from(double u_ev) {
  if (u_ev == PS_U_HARDCORE) return pairscope::OnSite::hardcore();
  if (u_ev < 0.0)
    throw pairscope::validation_error("VALIDATION_FAILED",
                                      "on-site repulsion must be >= 0 or PS_U_HARDCORE");
  return pairscope::OnSite::finite(u_ev);
}

pairscope::RunCommon common_from(const ps_run_options* options) {
  if (options == nullptr)
    throw pairscope::validation_error("VALIDATION_FAILED", "run options must not be null");
  pairscope::RunCommon c;
  c.grid_n = options->grid_n;
  c.threads = options->threads;
  c.out_dir = options->out_dir ? options->out_dir : ".";
  return c;
}

void require(bool ok, const char* what) {
  if (!ok) throw pairscope::validation_error("VALIDATION_FAILED", what);
}

}  // namespace

extern "C" {

const char* ps_version(void) { return pairscope::kVersion; }

const char* ps_last_error(void) { return g_last_error.c_str(); }

double ps_ev_to_kelvin(double ev) { return pairscope::ev_to_kelvin(ev); }
double ps_kelvin_to_ev(double kelvin) { return pairscope::kelvin_to_ev(kelvin); }

ps_status ps_model_create_from_file(const char* path, ps_model** out) {
  return guarded([&] {
    require(path != nullptr && out != nullptr, "null argument");
    auto model = std::make_unique<ps_model>();
    model->params = pairscope::load_model_config(path);
    *out = model.release();
  });
}

ps_status ps_model_create_from_string(const char* text, ps_model** out) {
  return guarded([&] {
    require(text != nullptr && out != nullptr, "null argument");
    auto model = std::make_unique<ps_model>();
    model->params = pairscope::parse_model_config(text);
    *out = model.release();
  });
}

void ps_model_destroy(ps_model* model) { delete model; }

ps_status ps_model_fingerprint(const ps_model* model, char* buf, size_t buflen) {
  return guarded([&] {
    require(model != nullptr && buf != nullptr, "null argument");
    const std::string fp = pairscope::fingerprint(model->params);
    require(buflen > fp.size(), "fingerprint buffer too small");
    std::memcpy(buf, fp.c_str(), fp.size() + 1);
  });
}

ps_status ps_model_default_u(const ps_model* model, double* u_ev) {
  return guarded([&] {
    require(model != nullptr && u_ev != nullptr, "null argument");
    *u_ev = model->params.onsite.is_hardcore() ? PS_U_HARDCORE : model->params.onsite.value();
  });
}

ps_status ps_model_check_nondegeneracy(const ps_model* model) {
  return guarded([&] {
    require(model != nullptr, "null argument");
    pairscope::validate_nondegeneracy(model->params);
  });
}

ps_status ps_fiber_solve(const ps_model* model, int grid_n, double k1, double k2, double u_ev,
                         ps_pair_state* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const pairscope::TorusGrid grid(grid_n);
    const pairscope::OnSite onsite = onsite_from(u_ev);
    const pairscope::PairState s =
        pairscope::solve_ground_state(model->params, grid, k1, k2, onsite);
    *out = ps_pair_state{};
    out->k1 = s.k1;
    out->k2 = s.k2;
    out->u_ev = onsite.is_hardcore() ? PS_U_HARDCORE : onsite.value();
    out->energy_ev = s.energy;
    out->gap_ev = s.gap;
    out->rho = s.pair_fraction;
    out->boson_energy_ev = s.boson_energy;
    out->essential_bottom_ev = s.essential_bottom;
    out->upsilon_hat_ev = s.exchange;
    out->degenerate_pair_shape = s.degenerate_pair_shape ? 1 : 0;
    if (s.psi_hat.size() > 0) {
      const pairscope::SymWeights w = pairscope::symmetry_decompose(grid, s.psi_hat);
      out->w_s = w.s;
      out->w_d = w.d;
      out->w_p = w.p;
      out->has_weights = 1;
    }
  });
}

ps_status ps_fiber_kinematics(const ps_model* model, int grid_n, double k1, double k2, double u_ev,
                              ps_kinematics* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const pairscope::TorusGrid grid(grid_n);
    const pairscope::OnSite onsite = onsite_from(u_ev);
    const auto v = pairscope::group_velocity(model->params, grid, k1, k2, onsite);
    *out = ps_kinematics{};
    out->v1 = v[0];
    out->v2 = v[1];
    try {
      const pairscope::MassTensorResult m =
          pairscope::mass_tensor(model->params, grid, k1, k2, onsite);
      out->m11 = m.m11;
      out->m12 = m.m12;
      out->m22 = m.m22;
      out->mass_ok = 1;
    } catch (const pairscope::Error& e) {
      if (e.name() != "SINGULAR_HESSIAN") throw;
      out->mass_ok = 0;
    }
  });
}

ps_status ps_essential_spectrum(const ps_model* model, double k1, double k2, double* lo,
                                double* hi) {
  return guarded([&] {
    require(model != nullptr && lo != nullptr && hi != nullptr, "null argument");
    const auto band = pairscope::essential_spectrum(model->params, k1, k2);
    *lo = band[0];
    *hi = band[1];
  });
}

ps_status ps_cmd_fiber(const ps_model* model, const ps_run_options* options, double k1, double k2,
                       double u_ev, int density_window, ps_fiber_run_result* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const auto summary =
        pairscope::run_fiber(model->params, common_from(options), k1, k2, onsite_from(u_ev),
                             density_window > 0 ? density_window : 24);
    *out = ps_fiber_run_result{};
    out->energy_ev = summary.energy;
    out->gap_ev = summary.gap;
    out->rho = summary.rho;
    out->binding_kelvin_abs_e = summary.binding_kelvin_abs_e;
    out->binding_kelvin_gap = summary.binding_kelvin_gap;
    out->binding_kelvin_below_b = summary.binding_kelvin_below_b;
  });
}

ps_status ps_cmd_sweep(const ps_model* model, const ps_run_options* options, int k_density,
                       double u_ev, ps_sweep_run_result* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const auto summary =
        pairscope::run_sweep(model->params, common_from(options), k_density, onsite_from(u_ev));
    *out = ps_sweep_run_result{};
    out->fibers = summary.fibers;
    out->cache_hits = summary.cache_hits;
    out->failed = summary.failed;
    out->e_min_ev = summary.e_min;
    out->e_min_k1 = summary.e_min_k1;
    out->e_min_k2 = summary.e_min_k2;
  });
}

ps_status ps_cmd_localize(const ps_model* model, const ps_run_options* options, double k1,
                          double k2, double u_ev, int window, ps_localize_run_result* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const auto summary = pairscope::run_localize(model->params, common_from(options), k1, k2,
                                                 onsite_from(u_ev), window);
    *out = ps_localize_run_result{};
    out->xi_psi_a_nm = summary.xi_psi_a_nm;
    out->xi_psi_b_nm = summary.xi_psi_b_nm;
    out->xi_density_a_nm = summary.xi_density_a_nm;
    out->xi_density_b_nm = summary.xi_density_b_nm;
    out->extent_a_nm = summary.extent_a_nm;
    out->extent_b_nm = summary.extent_b_nm;
    out->certificate_holds = summary.certificate_holds ? 1 : 0;
  });
}

ps_status ps_cmd_scatter(const ps_model* model, const ps_run_options* options, double k1,
                         double k2, double s, double t, int steps, int dyson_order,
                         int dyson_panels, int dump_matrices, ps_scatter_run_result* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const auto summary =
        pairscope::run_scatter(model->params, common_from(options), k1, k2, s, t, steps,
                               dyson_order, dyson_panels, dump_matrices != 0);
    *out = ps_scatter_run_result{};
    out->unitarity_error = summary.unitarity_error;
    out->ode_vs_exact = summary.ode_vs_exact;
    out->dyson_vs_exact = summary.dyson_vs_exact;
  });
}

ps_status ps_cmd_calibrate(const ps_model* model, const ps_run_options* options, double k1,
                           double k2, double u_ev, double target_rho, double tol,
                           ps_calibrate_run_result* out) {
  return guarded([&] {
    require(model != nullptr && out != nullptr, "null argument");
    const auto summary = pairscope::run_calibrate(model->params, common_from(options), k1, k2,
                                                  onsite_from(u_ev), target_rho, tol);
    *out = ps_calibrate_run_result{};
    out->fitted_peak_ev = summary.fitted_peak_ev;
    out->residual = summary.residual;
    out->iterations = summary.iterations;
  });
}

}  // extern "C"
