#include "pairscope/model.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "pairscope/constants.hpp"

namespace pairscope {

std::string OnSite::label() const {
  if (hardcore_) return "hardcore";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value_);
  return buf;
}

void ModelParams::validate() const {
  if (!(epsilon_ev >= 0.0))
    throw validation_error("VALIDATION_FAILED", "epsilon_eV must be >= 0");
  if (!(h_b >= 0.0)) throw validation_error("VALIDATION_FAILED", "h_b must be >= 0");
  if (!(lattice_spacing_nm > 0.0))
    throw validation_error("VALIDATION_FAILED", "lattice_spacing_nm must be > 0");
  u.require_rotation_invariant("u");
  p1.require_rotation_invariant("p1");
  p2.require_rotation_invariant("p2");
  for (const auto& [v, val] : u.entries())
    if (val < 0.0) throw validation_error("VALIDATION_FAILED", "u values must be >= 0");
  if (!p2.supported_on_even_sublattice())
    throw validation_error("VALIDATION_FAILED", "p2 must be supported on the even sublattice");
  {
    std::vector<std::pair<LatticeVector, double>> combined;
    for (const auto& e : p1.entries()) combined.push_back(e);
    for (const auto& e : p2.entries()) combined.push_back(e);
    if (LatticeCoupling::from_entries(combined).empty())
      throw validation_error("VALIDATION_FAILED", "p1 + p2 must not vanish identically");
  }
  if (const auto* c = std::get_if<LatticeCoupling>(&upsilon)) c->require_rotation_invariant("upsilon");
}

void ModelParams::require_bound_pair_regime() const {
  if (h_b > 0.5)
    throw validation_error("VALIDATION_FAILED",
                           "bound-pair operations require h_b in [0, 1/2] so the boson branch "
                           "stays below the essential spectrum; got h_b = " +
                               std::to_string(h_b));
}

namespace {

void append_coupling(std::ostringstream& out, const char* name, const LatticeCoupling& c) {
  out << name << ":";
  for (const auto& [v, val] : c.entries()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%d %d %.17g;", v.x, v.y, val);
    out << buf;
  }
  out << "\n";
}

}  // namespace

std::string ModelParams::canonical_string() const {
  std::ostringstream out;
  char buf[160];
  std::snprintf(buf, sizeof(buf), "epsilon_eV=%.17g\nh_b=%.17g\nU=%s\nlattice_spacing_nm=%.17g\n",
                epsilon_ev, h_b, onsite.label().c_str(), lattice_spacing_nm);
  out << buf;
  append_coupling(out, "u", u);
  append_coupling(out, "p1", p1);
  append_coupling(out, "p2", p2);
  if (const auto* prof = std::get_if<MomentumProfile>(&upsilon)) {
    std::snprintf(buf, sizeof(buf), "upsilon_profile=two_lobe_rational %.17g %.17g\n",
                  prof->peak(), prof->alpha());
    out << buf;
  } else {
    append_coupling(out, "upsilon", std::get<LatticeCoupling>(upsilon));
  }
  return out.str();
}

double fourier_coupling(const LatticeCoupling& c, double q1, double q2) {
  return c.fourier(q1, q2);
}

double eval_upsilon_hat(const ModelParams& params, double k1, double k2) {
  if (const auto* prof = std::get_if<MomentumProfile>(&params.upsilon)) return (*prof)(k1, k2);
  return std::get<LatticeCoupling>(params.upsilon).fourier(k1, k2);
}

std::array<double, 2> eval_upsilon_hat_gradient(const ModelParams& params, double k1, double k2) {
  if (const auto* prof = std::get_if<MomentumProfile>(&params.upsilon))
    return prof->gradient(k1, k2);
  return std::get<LatticeCoupling>(params.upsilon).fourier_gradient(k1, k2);
}

std::complex<double> eval_d(const ModelParams& params, double k1, double k2, double p1c,
                            double p2c) {
  const double v1 = params.p1.fourier(k1 + p1c, k2 + p2c);
  const double v2 = params.p2.fourier(0.5 * k1 + p1c, 0.5 * k2 + p2c);
  return {v1 + v2, 0.0};
}

NondegeneracyReport validate_nondegeneracy(const ModelParams& params, int sample_n) {
  NondegeneracyReport report;
  if (params.p1.has_point_outside_even_sublattice()) {
    // p2 vanishes off the even sublattice, so d(k) keeps a nonvanishing
    // Fourier coefficient there for every k.
    report.passed = true;
    report.via_sufficient_condition = true;
    return report;
  }
  double best = std::numeric_limits<double>::infinity();
  double bestk1 = 0.0, bestk2 = 0.0;
  for (int a = 0; a < sample_n; ++a) {
    const double k1 = -kPi + 2.0 * kPi * a / sample_n;
    for (int b = 0; b < sample_n; ++b) {
      const double k2 = -kPi + 2.0 * kPi * b / sample_n;
      double fiber_max = 0.0;
      for (int c = 0; c < sample_n; ++c) {
        const double q1 = -kPi + 2.0 * kPi * c / sample_n;
        for (int d = 0; d < sample_n; ++d) {
          const double q2 = -kPi + 2.0 * kPi * d / sample_n;
          fiber_max = std::max(fiber_max, std::abs(eval_d(params, k1, k2, q1, q2)));
        }
      }
      if (fiber_max < best) {
        best = fiber_max;
        bestk1 = k1;
        bestk2 = k2;
      }
    }
  }
  report.min_abs_d = best;
  report.argmin_k1 = bestk1;
  report.argmin_k2 = bestk2;
  report.passed = best > 1e-10;
  if (!report.passed) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "pair-shape form factor vanishes on the fiber k = (%.6f, %.6f)", bestk1, bestk2);
    throw validation_error("VALIDATION_FAILED", buf);
  }
  return report;
}

// Config file -----------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

ModelParams parse_model_config(const std::string& text) {
  ModelParams params;
  std::vector<std::pair<LatticeVector, double>> u_rows, p1_rows, p2_rows, ups_rows;
  bool have_upsilon_table = false;
  bool have_profile = false;
  double profile_peak = 0.0, profile_alpha = 1.0;
  std::string profile_form = "two_lobe_rational";
  bool onsite_set = false;

  std::string section;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      if (section == "upsilon") have_upsilon_table = true;
      if (section == "upsilon_profile") have_profile = true;
      continue;
    }
    auto eq = line.find('=');
    if (section.empty() || section == "upsilon_profile") {
      if (eq == std::string::npos)
        throw validation_error("VALIDATION_FAILED",
                               "config line " + std::to_string(lineno) + ": expected key = value");
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      if (section.empty()) {
        if (key == "epsilon_eV") params.epsilon_ev = std::stod(val);
        else if (key == "h_b") params.h_b = std::stod(val);
        else if (key == "U_eV" || key == "U") {
          params.onsite = (val == "hardcore") ? OnSite::hardcore() : OnSite::finite(std::stod(val));
          onsite_set = true;
        } else if (key == "lattice_spacing_nm") params.lattice_spacing_nm = std::stod(val);
        else if (key == "u_note") params.u_documentation = val;
        else
          throw validation_error("VALIDATION_FAILED",
                                 "config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
      } else {
        if (key == "form") profile_form = val;
        else if (key == "alpha") profile_alpha = std::stod(val);
        else if (key == "peak_eV") profile_peak = std::stod(val);
        else
          throw validation_error("VALIDATION_FAILED", "config line " + std::to_string(lineno) +
                                                          ": unknown profile key '" + key + "'");
      }
      continue;
    }
    // Coupling table row: x y value.
    std::istringstream row(line);
    int x = 0, y = 0;
    double v = 0.0;
    if (!(row >> x >> y >> v))
      throw validation_error("VALIDATION_FAILED", "config line " + std::to_string(lineno) +
                                                      ": expected 'x y value' in [" + section + "]");
    if (section == "u") u_rows.push_back({{x, y}, v});
    else if (section == "p1") p1_rows.push_back({{x, y}, v});
    else if (section == "p2") p2_rows.push_back({{x, y}, v});
    else if (section == "upsilon") ups_rows.push_back({{x, y}, v});
    else
      throw validation_error("VALIDATION_FAILED", "config: unknown section [" + section + "]");
  }

  if (!onsite_set) throw validation_error("VALIDATION_FAILED", "config: missing U_eV");
  params.u = LatticeCoupling::from_entries(u_rows);
  if (params.u_documentation == ModelParams{}.u_documentation && !params.u.empty()) {
    std::ostringstream doc;
    doc << "u table with " << params.u.entries().size() << " sites, sum |u| = "
        << params.u.sum_abs() << " eV";
    params.u_documentation = doc.str();
  }
  params.p1 = LatticeCoupling::from_entries(p1_rows);
  params.p2 = LatticeCoupling::from_entries(p2_rows);
  if (have_profile && have_upsilon_table)
    throw validation_error("VALIDATION_FAILED", "config: give either [upsilon] or [upsilon_profile]");
  if (have_profile) {
    if (profile_form != "two_lobe_rational")
      throw validation_error("VALIDATION_FAILED", "config: unknown profile form '" + profile_form + "'");
    params.upsilon = MomentumProfile(profile_peak, profile_alpha);
  } else {
    params.upsilon = LatticeCoupling::from_entries(ups_rows);
  }
  params.validate();
  return params;
}

ModelParams load_model_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model_config(buf.str());
}

std::string fingerprint(const ModelParams& params) {
  const std::string canon = params.canonical_string();
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace pairscope
