#pragma once

// Physical parameters of the two-fermion/one-boson exchange model and their
// momentum-space evaluation. A validated ModelParams is immutable and is the
// single source of truth for every operator assembled downstream.

#include <complex>
#include <optional>
#include <string>
#include <variant>

#include "pairscope/couplings.hpp"

namespace pairscope {

// On-site repulsion strength: a finite value in eV or the hard-core limit.
class OnSite {
 public:
  static OnSite finite(double value_ev) {
    if (!(value_ev >= 0.0)) throw validation_error("VALIDATION_FAILED", "on-site repulsion must be >= 0");
    return OnSite(value_ev, false);
  }
  static OnSite hardcore() { return OnSite(0.0, true); }

  bool is_hardcore() const { return hardcore_; }
  double value() const { return value_; }
  std::string label() const;

  friend bool operator==(const OnSite& a, const OnSite& b) {
    return a.hardcore_ == b.hardcore_ && (a.hardcore_ || a.value_ == b.value_);
  }

 private:
  OnSite(double v, bool hc) : value_(v), hardcore_(hc) {}
  double value_;
  bool hardcore_;
};

struct ModelParams {
  double epsilon_ev = 0.0;           // fermion hopping
  double h_b = 0.0;                  // boson/fermion hopping ratio
  OnSite onsite = OnSite::finite(0.0);
  LatticeCoupling u;                 // extended repulsion, values >= 0
  LatticeCoupling p1, p2;            // pair-shape weights
  std::variant<LatticeCoupling, MomentumProfile> upsilon = LatticeCoupling{};
  double lattice_spacing_nm = 0.2672;

  // Free-form note recorded in manifests describing the chosen u.
  std::string u_documentation = "u = 0 (bare on-site repulsion only)";

  bool upsilon_is_profile() const { return std::holds_alternative<MomentumProfile>(upsilon); }

  // Structural validation; throws VALIDATION_FAILED on the first violation.
  void validate() const;
  // Bound-pair operations additionally require h_b in [0, 1/2].
  void require_bound_pair_regime() const;

  double r_p() const { return 0.5 * (p1.mean_radius() + p2.mean_radius()); }

  // Deterministic canonical text form; basis of the config fingerprint.
  std::string canonical_string() const;
};

// Momentum-space couplings --------------------------------------------------

// Fourier transform of a finite rotation-invariant coupling at q (exact
// cosine sum, result exactly real).
double fourier_coupling(const LatticeCoupling& c, double q1, double q2);

// Exchange amplitude at k.
double eval_upsilon_hat(const ModelParams& params, double k1, double k2);
std::array<double, 2> eval_upsilon_hat_gradient(const ModelParams& params, double k1, double k2);

// Pair-shape form factor d(k)(p) = p1^(k+p) + p2^(k/2+p). Real for the
// reflection-symmetric couplings enforced here; returned as complex to keep
// the contract general.
std::complex<double> eval_d(const ModelParams& params, double k1, double k2, double p1c, double p2c);

struct NondegeneracyReport {
  bool passed = false;
  bool via_sufficient_condition = false;
  double min_abs_d = 0.0;
  double argmin_k1 = 0.0, argmin_k2 = 0.0;
};

// Checks that the pair-shape form factor never vanishes identically on a
// fiber. Passes structurally when p1 has support outside the even sublattice,
// otherwise scans a dense (k,p) sample.
NondegeneracyReport validate_nondegeneracy(const ModelParams& params, int sample_n = 48);

// Config file ----------------------------------------------------------------

// Flat key-value format with coupling tables; see README for the schema.
ModelParams parse_model_config(const std::string& text);
ModelParams load_model_config(const std::string& path);

// FNV-1a 64 fingerprint of the canonical parameter serialization.
std::string fingerprint(const ModelParams& params);

}  // namespace pairscope
