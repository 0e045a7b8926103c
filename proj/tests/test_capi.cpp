#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "pairscope.h"

namespace {

const char* kConfig = R"(
epsilon_eV = 0.266
h_b = 0.00575
U_eV = 1.461
lattice_spacing_nm = 0.2672
[u]
1 0 0.36525
-1 0 0.36525
0 1 0.36525
0 -1 0.36525
[p1]
0 0 1
1 0 1
-1 0 1
0 1 1
0 -1 1
[p2]
0 0 1
2 0 1
-2 0 1
0 2 1
0 -2 1
[upsilon_profile]
form = two_lobe_rational
alpha = 1.0
peak_eV = 0.11
)";

struct Model {
  ps_model* handle = nullptr;
  ~Model() { ps_model_destroy(handle); }
};

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() / ("pairscope_capi_" + tag);
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("version and conversions") {
  CHECK(std::string(ps_version()).find('.') != std::string::npos);
  CHECK(ps_ev_to_kelvin(1.0) == doctest::Approx(11604.5).epsilon(1e-4));
  CHECK(ps_kelvin_to_ev(ps_ev_to_kelvin(0.5)) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("model lifecycle and validation") {
  Model m;
  REQUIRE(ps_model_create_from_string(kConfig, &m.handle) == PS_OK);
  char fp[32];
  CHECK(ps_model_fingerprint(m.handle, fp, sizeof(fp)) == PS_OK);
  CHECK(std::strlen(fp) == 16);
  double u = 0.0;
  CHECK(ps_model_default_u(m.handle, &u) == PS_OK);
  CHECK(u == doctest::Approx(1.461));
  CHECK(ps_model_check_nondegeneracy(m.handle) == PS_OK);

  SUBCASE("broken rotation invariance is a validation error") {
    const char* bad =
        "epsilon_eV=0.2\nh_b=0.1\nU_eV=1.0\n[p1]\n1 0 1\n[upsilon]\n0 0 0.1\n";
    ps_model* handle = nullptr;
    CHECK(ps_model_create_from_string(bad, &handle) == PS_ERR_VALIDATION);
    CHECK(std::string(ps_last_error()).find("rotation") != std::string::npos);
    CHECK(handle == nullptr);
  }
  SUBCASE("null arguments are rejected") {
    CHECK(ps_model_create_from_string(nullptr, nullptr) == PS_ERR_VALIDATION);
    CHECK(ps_fiber_solve(nullptr, 8, 0.0, 0.0, 0.0, nullptr) == PS_ERR_VALIDATION);
  }
  SUBCASE("missing config file is an io error") {
    ps_model* handle = nullptr;
    CHECK(ps_model_create_from_file("/nonexistent/path.cfg", &handle) == PS_ERR_IO);
  }
}

TEST_CASE("fiber solves through the C surface") {
  Model m;
  REQUIRE(ps_model_create_from_string(kConfig, &m.handle) == PS_OK);
  const double pi = 3.14159265358979323846;

  ps_pair_state state{};
  REQUIRE(ps_fiber_solve(m.handle, 16, -pi, 0.0, 1.461, &state) == PS_OK);
  CHECK(state.energy_ev < 0.0);
  CHECK(state.gap_ev > 0.0);
  CHECK(state.rho > 0.0);
  CHECK(state.rho < 1.0);
  CHECK(state.has_weights == 1);
  CHECK(state.w_s + state.w_d + state.w_p == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(state.w_p < 1e-12);

  SUBCASE("hard-core sentinel raises the energy") {
    ps_pair_state hc{};
    REQUIRE(ps_fiber_solve(m.handle, 16, -pi, 0.0, PS_U_HARDCORE, &hc) == PS_OK);
    CHECK(hc.u_ev == PS_U_HARDCORE);
    CHECK(hc.energy_ev > state.energy_ev);
  }
  SUBCASE("negative repulsion other than the sentinel is invalid") {
    ps_pair_state out{};
    CHECK(ps_fiber_solve(m.handle, 16, -pi, 0.0, -0.5, &out) == PS_ERR_VALIDATION);
  }
  SUBCASE("kinematics") {
    ps_kinematics kin{};
    REQUIRE(ps_fiber_kinematics(m.handle, 16, -pi + 0.2, 0.3, 1.461, &kin) == PS_OK);
    CHECK(kin.mass_ok == 1);
    CHECK((kin.v1 != 0.0 || kin.v2 != 0.0));
  }
  SUBCASE("essential spectrum") {
    double lo = 0.0, hi = 0.0;
    REQUIRE(ps_essential_spectrum(m.handle, -pi, 0.0, &lo, &hi) == PS_OK);
    CHECK(lo == doctest::Approx(2.0 * 0.266));
    CHECK(hi == doctest::Approx(6.0 * 0.266));
  }
}

TEST_CASE("uncoupled config lands on the boson branch") {
  const char* free_cfg =
      "epsilon_eV=0.266\nh_b=0.00575\nU_eV=1.461\n[p1]\n0 0 1\n1 0 1\n-1 0 1\n0 1 1\n0 -1 1\n"
      "[upsilon]\n";  // empty table: exchange off everywhere
  Model m;
  REQUIRE(ps_model_create_from_string(free_cfg, &m.handle) == PS_OK);
  ps_pair_state state{};
  REQUIRE(ps_fiber_solve(m.handle, 8, 0.7, -0.7, 1.461, &state) == PS_OK);
  const double b = 0.00575 * 0.266 * (2.0 - std::cos(0.7) - std::cos(-0.7));
  CHECK(state.energy_ev == doctest::Approx(b).epsilon(1e-12));
  CHECK(state.rho == 1.0);
  CHECK(state.has_weights == 0);
}

TEST_CASE("bound-pair regime flag propagates as a validation error") {
  const char* high_hb =
      "epsilon_eV=0.266\nh_b=0.9\nU_eV=1.461\n[p1]\n0 0 1\n1 0 1\n-1 0 1\n0 1 1\n0 -1 1\n"
      "[upsilon]\n0 0 0.1\n";
  Model m;
  REQUIRE(ps_model_create_from_string(high_hb, &m.handle) == PS_OK);
  ps_pair_state state{};
  CHECK(ps_fiber_solve(m.handle, 8, 0.3, 0.3, 1.0, &state) == PS_ERR_VALIDATION);
  CHECK(std::string(ps_last_error()).find("h_b in [0, 1/2]") != std::string::npos);
}

TEST_CASE("commands write outputs behind the C surface") {
  Model m;
  REQUIRE(ps_model_create_from_string(kConfig, &m.handle) == PS_OK);
  const double pi = 3.14159265358979323846;
  TempDir dir("cmd");
  const std::string out = dir.path.string();
  ps_run_options options{8, 1, out.c_str()};

  ps_fiber_run_result fiber{};
  REQUIRE(ps_cmd_fiber(m.handle, &options, -pi, 0.0, 1.461, 4, &fiber) == PS_OK);
  CHECK(fiber.binding_kelvin_abs_e > 0.0);
  CHECK(std::filesystem::exists(dir.path / "pair_state.json"));

  ps_sweep_run_result sweep{};
  REQUIRE(ps_cmd_sweep(m.handle, &options, 4, 1.461, &sweep) == PS_OK);
  CHECK(sweep.fibers == 16);
  CHECK(sweep.cache_hits == 0);
  ps_sweep_run_result again{};
  REQUIRE(ps_cmd_sweep(m.handle, &options, 4, 1.461, &again) == PS_OK);
  CHECK(again.cache_hits == 16);

  ps_scatter_run_result scatter{};
  REQUIRE(ps_cmd_scatter(m.handle, &options, -pi, 0.0, 0.0, 0.8, 64, 2, 2, 0, &scatter) == PS_OK);
  CHECK(scatter.unitarity_error < 1e-8);

  ps_calibrate_run_result cal{};
  ps_run_options cal_options{16, 1, out.c_str()};
  REQUIRE(ps_cmd_calibrate(m.handle, &cal_options, -pi, 0.0, 1.461, 0.95, 1e-4, &cal) == PS_OK);
  CHECK(cal.fitted_peak_ev > 0.0);
}
