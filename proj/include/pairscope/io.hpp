#pragma once

// Result persistence: deterministic CSV/JSON writers (17 significant digits,
// fixed iteration order), the versioned binary container for grid functions,
// run manifests, and the content-addressed fiber cache.

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "pairscope/dispersion.hpp"
#include "pairscope/spectral.hpp"

namespace pairscope {

// Round-trip-safe float formatting used by every writer.
std::string format_double(double v);

// Grid-function container ----------------------------------------------------
//
// Binary layout (little endian): magic "PSGF", u32 version = 1, u32 N,
// then N^2 (re, im) f64 pairs in index order.
void write_grid_function_bin(const std::filesystem::path& path, const TorusGrid& grid,
                             const GridFunction& phi);
GridFunction read_grid_function_bin(const std::filesystem::path& path, int* n_out = nullptr);

// CSV with header p1,p2,re,im.
void write_grid_function_csv(const std::filesystem::path& path, const TorusGrid& grid,
                             const GridFunction& phi);

// Density CSV with header x,y,density.
void write_density_csv(const std::filesystem::path& path, const LatticeWindow& density);

// Dense complex matrix container: magic "PSMX", u32 version = 1, u32 rows,
// u32 cols, then row-major (re, im) f64 pairs.
void write_matrix_bin(const std::filesystem::path& path, const Eigen::MatrixXcd& m);
Eigen::MatrixXcd read_matrix_bin(const std::filesystem::path& path);

// Dispersion table CSV; header pinned to
// k1,k2,E_eV,gap_eV,rho,v1,v2,m11,m12,m22,w_s,w_d,w_p
void write_dispersion_csv(const std::filesystem::path& path, const DispersionTable& table);
nlohmann::json dispersion_to_json(const DispersionTable& table);

nlohmann::json pair_state_to_json(const PairState& state);

// Manifest --------------------------------------------------------------------

struct RunManifest {
  std::string config_fingerprint;
  std::string tool_version;
  int grid_n = 0;
  std::string onsite;
  std::string timestamp_utc;  // metadata only; result files stay deterministic
  std::string u_documentation;
  std::vector<std::string> outputs;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

// Fiber cache ------------------------------------------------------------------
//
// Content-addressed directory of per-fiber sweep records plus an append-only
// index; writes go through a temp file and an atomic rename.
class FiberCache {
 public:
  explicit FiberCache(std::filesystem::path dir);

  std::string key(const std::string& fingerprint, int grid_n, const OnSite& onsite, double k1,
                  double k2) const;
  std::optional<SweepRecord> load(const std::string& key) const;
  void store(const std::string& key, const SweepRecord& record);

  int hits() const { return hits_; }
  int misses() const { return misses_; }

 private:
  std::filesystem::path dir_;
  mutable int hits_ = 0;
  mutable int misses_ = 0;
};

std::string fnv1a_hex(const std::string& data);

}  // namespace pairscope
