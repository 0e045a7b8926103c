#include "pairscope/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <cstring>
#include <fstream>

namespace pairscope {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot write '" + tmp.string() + "'");
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

void put_u32(std::string& buf, uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& buf, double v) {
  static_assert(sizeof(double) == 8);
  char raw[8];
  std::memcpy(raw, &v, 8);
  buf.append(raw, 8);
}

}  // namespace

void write_grid_function_bin(const std::filesystem::path& path, const TorusGrid& grid,
                             const GridFunction& phi) {
  std::string buf;
  buf.reserve(12 + static_cast<size_t>(grid.size()) * 16);
  buf += "PSGF";
  put_u32(buf, 1u);
  put_u32(buf, static_cast<uint32_t>(grid.n()));
  for (int i = 0; i < grid.size(); ++i) {
    put_f64(buf, phi[i].real());
    put_f64(buf, phi[i].imag());
  }
  write_text_atomic(path, buf);
}

GridFunction read_grid_function_bin(const std::filesystem::path& path, int* n_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path.string() + "'");
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || buf.compare(0, 4, "PSGF") != 0)
    throw io_error("not a grid-function container: '" + path.string() + "'");
  auto get_u32 = [&](size_t off) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
    return v;
  };
  const uint32_t version = get_u32(4);
  if (version != 1u) throw io_error("unsupported container version");
  const uint32_t n = get_u32(8);
  const size_t count = static_cast<size_t>(n) * n;
  if (buf.size() != 12 + count * 16) throw io_error("truncated grid-function container");
  GridFunction phi(static_cast<Eigen::Index>(count));
  size_t off = 12;
  for (size_t i = 0; i < count; ++i) {
    double re = 0.0, im = 0.0;
    std::memcpy(&re, buf.data() + off, 8);
    std::memcpy(&im, buf.data() + off + 8, 8);
    phi[static_cast<Eigen::Index>(i)] = {re, im};
    off += 16;
  }
  if (n_out) *n_out = static_cast<int>(n);
  return phi;
}

void write_grid_function_csv(const std::filesystem::path& path, const TorusGrid& grid,
                             const GridFunction& phi) {
  std::string out = "p1,p2,re,im\n";
  for (int i = 0; i < grid.size(); ++i) {
    const auto [p1, p2] = grid.point(i);
    out += format_double(p1) + "," + format_double(p2) + "," + format_double(phi[i].real()) +
           "," + format_double(phi[i].imag()) + "\n";
  }
  write_text_atomic(path, out);
}

void write_density_csv(const std::filesystem::path& path, const LatticeWindow& density) {
  std::string out = "x y density\n";
  const int w = density.w();
  for (int x = -w; x <= w; ++x)
    for (int y = -w; y <= w; ++y)
      out += std::to_string(x) + " " + std::to_string(y) + " " +
             format_double(density.at(x, y).real()) + "\n";
  write_text_atomic(path, out);
}

void write_matrix_bin(const std::filesystem::path& path, const Eigen::MatrixXcd& m) {
  std::string buf;
  buf.reserve(16 + static_cast<size_t>(m.size()) * 16);
  buf += "PSMX";
  put_u32(buf, 1u);
  put_u32(buf, static_cast<uint32_t>(m.rows()));
  put_u32(buf, static_cast<uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put_f64(buf, m(r, c).real());
      put_f64(buf, m(r, c).imag());
    }
  }
  write_text_atomic(path, buf);
}

Eigen::MatrixXcd read_matrix_bin(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open '" + path.string() + "'");
  std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 16 || buf.compare(0, 4, "PSMX") != 0)
    throw io_error("not a matrix container: '" + path.string() + "'");
  auto get_u32 = [&](size_t off) {
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<uint32_t>(static_cast<unsigned char>(buf[off + i])) << (8 * i);
    return v;
  };
  if (get_u32(4) != 1u) throw io_error("unsupported container version");
  const uint32_t rows = get_u32(8), cols = get_u32(12);
  if (buf.size() != 16 + static_cast<size_t>(rows) * cols * 16)
    throw io_error("truncated matrix container");
  Eigen::MatrixXcd m(rows, cols);
  size_t off = 16;
  for (uint32_t r = 0; r < rows; ++r) {
    for (uint32_t c = 0; c < cols; ++c) {
      double re = 0.0, im = 0.0;
      std::memcpy(&re, buf.data() + off, 8);
      std::memcpy(&im, buf.data() + off + 8, 8);
      m(r, c) = {re, im};
      off += 16;
    }
  }
  return m;
}

namespace {

std::string csv_number(double v, bool ok) { return ok ? format_double(v) : "nan"; }

}  // namespace

void write_dispersion_csv(const std::filesystem::path& path, const DispersionTable& table) {
  std::string out = "k1,k2,E_eV,gap_eV,rho,v1,v2,m11,m12,m22,w_s,w_d,w_p\n";
  for (const auto& r : table.records) {
    if (r.skipped || !r.error.empty()) continue;
    out += format_double(r.k1) + "," + format_double(r.k2) + "," + format_double(r.energy) + "," +
           format_double(r.gap) + "," + format_double(r.rho) + "," +
           csv_number(r.v1, r.kinematics_ok) + "," + csv_number(r.v2, r.kinematics_ok) + "," +
           csv_number(r.m11, r.mass_ok) + "," + csv_number(r.m12, r.mass_ok) + "," +
           csv_number(r.m22, r.mass_ok) + "," + csv_number(r.weights.s, r.has_weights) + "," +
           csv_number(r.weights.d, r.has_weights) + "," + csv_number(r.weights.p, r.has_weights) +
           "\n";
  }
  write_text_atomic(path, out);
}

namespace {

json record_to_json(const SweepRecord& r) {
  json j;
  j["k1"] = r.k1;
  j["k2"] = r.k2;
  j["skipped"] = r.skipped;
  j["error"] = r.error;
  j["E_eV"] = r.energy;
  j["gap_eV"] = r.gap;
  j["rho"] = r.rho;
  j["kinematics_ok"] = r.kinematics_ok;
  j["v1"] = r.v1;
  j["v2"] = r.v2;
  j["mass_ok"] = r.mass_ok;
  j["m11"] = r.m11;
  j["m12"] = r.m12;
  j["m22"] = r.m22;
  j["has_weights"] = r.has_weights;
  j["w_s"] = r.weights.s;
  j["w_d"] = r.weights.d;
  j["w_p"] = r.weights.p;
  return j;
}

SweepRecord record_from_json(const json& j) {
  SweepRecord r;
  r.k1 = j.at("k1").get<double>();
  r.k2 = j.at("k2").get<double>();
  r.skipped = j.at("skipped").get<bool>();
  r.error = j.at("error").get<std::string>();
  r.energy = j.at("E_eV").get<double>();
  r.gap = j.at("gap_eV").get<double>();
  r.rho = j.at("rho").get<double>();
  r.kinematics_ok = j.at("kinematics_ok").get<bool>();
  r.v1 = j.at("v1").get<double>();
  r.v2 = j.at("v2").get<double>();
  r.mass_ok = j.at("mass_ok").get<bool>();
  r.m11 = j.at("m11").get<double>();
  r.m12 = j.at("m12").get<double>();
  r.m22 = j.at("m22").get<double>();
  r.has_weights = j.at("has_weights").get<bool>();
  r.weights.s = j.at("w_s").get<double>();
  r.weights.d = j.at("w_d").get<double>();
  r.weights.p = j.at("w_p").get<double>();
  return r;
}

}  // namespace

json dispersion_to_json(const DispersionTable& table) {
  json j;
  j["grid_n"] = table.grid_n;
  j["U"] = table.onsite.label();
  j["params_fingerprint"] = table.params_fingerprint;
  j["records"] = json::array();
  for (const auto& r : table.records) j["records"].push_back(record_to_json(r));
  return j;
}

json pair_state_to_json(const PairState& state) {
  json j;
  j["k1"] = state.k1;
  j["k2"] = state.k2;
  j["U"] = state.onsite.label();
  j["E_eV"] = state.energy;
  j["gap_eV"] = state.gap;
  j["rho"] = state.pair_fraction;
  j["b_eV"] = state.boson_energy;
  j["z_eV"] = state.essential_bottom;
  j["upsilon_hat_eV"] = state.exchange;
  j["bosonic_amp"] = state.bosonic_amp;
  j["residual_eV"] = state.residual;
  j["degenerate_pair_shape"] = state.degenerate_pair_shape;
  return j;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  json j;
  j["config_fingerprint"] = manifest.config_fingerprint;
  j["tool_version"] = manifest.tool_version;
  j["grid_n"] = manifest.grid_n;
  j["U"] = manifest.onsite;
  j["timestamp_utc"] = manifest.timestamp_utc;
  j["u_documentation"] = manifest.u_documentation;
  j["outputs"] = manifest.outputs;
  write_text_atomic(path, j.dump(2) + "\n");
}

std::string fnv1a_hex(const std::string& data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

FiberCache::FiberCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string FiberCache::key(const std::string& fp, int grid_n, const OnSite& onsite, double k1,
                            double k2) const {
  return fnv1a_hex(fp + "|" + std::to_string(grid_n) + "|" + onsite.label() + "|" +
                   format_double(k1) + "|" + format_double(k2));
}

std::optional<SweepRecord> FiberCache::load(const std::string& key) const {
  const std::filesystem::path file = dir_ / ("fiber_" + key + ".json");
  std::ifstream in(file);
  if (!in) {
    ++misses_;
    return std::nullopt;
  }
  try {
    json j;
    in >> j;
    ++hits_;
    return record_from_json(j);
  } catch (...) {
    ++misses_;
    return std::nullopt;
  }
}

void FiberCache::store(const std::string& key, const SweepRecord& record) {
  const std::filesystem::path file = dir_ / ("fiber_" + key + ".json");
  write_text_atomic(file, record_to_json(record).dump(2) + "\n");
  std::ofstream index(dir_ / "cache_index.txt", std::ios::app);
  index << key << " " << file.filename().string() << "\n";
}

}  // namespace pairscope
