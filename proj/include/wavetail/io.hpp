#pragma once
// File formats.
//  * Series (time series, ray curves, radial profiles): two-column ASCII,
//    "%.17g %.17g\n" so round-trips are bit-exact for doubles.  Complex
//    radial fields add a third column (x, Re, Im).
//  * Snapshots: little-endian binary, magic "WVSNAP01", then u64 n and f64
//    t, x0, h, followed by phi[n] and pi[n].
//  * Run manifests: JSON with the config (and its FNV-1a hash), a
//    code_version tag, the output inventory (path, bytes, checksum), and
//    wall-clock accounting per stage.  Reruns of the same config are
//    byte-identical except for the wall_clock fields.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavetail/common.hpp"
#include "wavetail/evolve.hpp"
#include "wavetail/grid.hpp"

namespace wavetail {

inline constexpr const char* code_version = "wavetail 1.0.0";

inline void ensure_can_write(const std::string& path, bool force) {
  if (!force && std::filesystem::exists(path))
    fail(errc::overwrite_refused, "refusing to overwrite " + path + " (use --force)");
  std::filesystem::path dir = std::filesystem::path(path).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

namespace detail {

inline std::string fmt17(double a, double b) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g %.17g\n", a, b);
  return buf;
}

inline std::string fmt17(double a, double b, double c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", a, b, c);
  return buf;
}

}  // namespace detail

inline void write_series(const std::string& path, const TimeSeries& s, bool force = false) {
  ensure_can_write(path, force);
  std::ofstream out(path);
  if (!out) fail(errc::bad_config, "cannot open " + path);
  for (std::size_t k = 0; k < s.size(); ++k) out << detail::fmt17(s.t(k), s.v[k]);
}

inline void write_curve(const std::string& path, const Curve& c, bool force = false) {
  ensure_can_write(path, force);
  std::ofstream out(path);
  if (!out) fail(errc::bad_config, "cannot open " + path);
  for (std::size_t k = 0; k < c.t.size(); ++k) out << detail::fmt17(c.t[k], c.v[k]);
}

inline Curve read_curve(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::bad_config, "cannot open " + path);
  Curve c;
  double a, b;
  while (in >> a >> b) {
    c.t.push_back(a);
    c.v.push_back(b);
  }
  return c;
}

// Uniform-step series from a two-column file; validates the cadence.
inline TimeSeries read_series(const std::string& path) {
  Curve c = read_curve(path);
  if (c.t.size() < 2) fail(errc::bad_config, path + ": need >= 2 samples");
  TimeSeries s{c.t.front(), (c.t.back() - c.t.front()) / double(c.t.size() - 1), c.v};
  for (std::size_t k = 0; k < c.t.size(); ++k)
    if (std::abs(c.t[k] - s.t(k)) > 1e-9 * (1.0 + std::abs(c.t[k])))
      fail(errc::bad_config, path + ": non-uniform time step");
  return s;
}

inline void write_complex_field(const std::string& path, const RadialGrid& g,
                                const std::vector<cd>& v, bool force = false) {
  ensure_can_write(path, force);
  std::ofstream out(path);
  if (!out) fail(errc::bad_config, "cannot open " + path);
  for (int i = 0; i < g.n; ++i) out << detail::fmt17(g.x(i), v[i].real(), v[i].imag());
}

inline void write_real_field(const std::string& path, const RadialGrid& g,
                             const std::vector<double>& v, bool force = false) {
  ensure_can_write(path, force);
  std::ofstream out(path);
  if (!out) fail(errc::bad_config, "cannot open " + path);
  for (int i = 0; i < g.n; ++i) out << detail::fmt17(g.x(i), v[i]);
}

// ------------------------------------------------------------- snapshots

inline void write_snapshot(const std::string& path, const Snapshot& s, bool force = false) {
  ensure_can_write(path, force);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(errc::bad_config, "cannot open " + path);
  out.write("WVSNAP01", 8);
  std::uint64_t n = s.phi.size();
  double head[3] = {s.t, s.g.x0, s.g.h};
  out.write(reinterpret_cast<const char*>(&n), 8);
  out.write(reinterpret_cast<const char*>(head), sizeof head);
  out.write(reinterpret_cast<const char*>(s.phi.data()), 8 * n);
  out.write(reinterpret_cast<const char*>(s.pi.data()), 8 * n);
}

inline Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::bad_config, "cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::string(magic, 8) != "WVSNAP01")
    fail(errc::bad_config, path + ": not a snapshot file");
  std::uint64_t n = 0;
  double head[3];
  in.read(reinterpret_cast<char*>(&n), 8);
  in.read(reinterpret_cast<char*>(head), sizeof head);
  Snapshot s;
  s.t = head[0];
  s.g = {head[1], head[2], static_cast<int>(n)};
  s.phi.resize(n);
  s.pi.resize(n);
  in.read(reinterpret_cast<char*>(s.phi.data()), 8 * n);
  in.read(reinterpret_cast<char*>(s.pi.data()), 8 * n);
  if (!in) fail(errc::bad_config, path + ": truncated snapshot");
  return s;
}

// ------------------------------------------------------------- manifest

inline std::uint64_t file_fnv64(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(errc::bad_config, "cannot open " + path);
  std::uint64_t h = 14695981039346656037ull;
  char buf[65536];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i)
      h = (h ^ static_cast<unsigned char>(buf[i])) * 1099511628211ull;
    if (got < static_cast<std::streamsize>(sizeof buf)) break;
  }
  return h;
}

struct RunManifest {
  nlohmann::json config;
  std::vector<std::string> stages;
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::vector<std::string> outputs;
  double wall_clock_sec = 0.0;

  nlohmann::json to_json() const {
    nlohmann::json j;
    j["code_version"] = code_version;
    j["config"] = config;
    j["config_fnv64"] = hex64(fnv1a(config.dump()));
    j["stages"] = nlohmann::json::array();
    for (std::size_t i = 0; i < stages.size(); ++i) {
      nlohmann::json s;
      s["name"] = stages[i];
      if (i < stage_seconds.size()) s["wall_clock_sec"] = stage_seconds[i].second;
      j["stages"].push_back(s);
    }
    j["outputs"] = nlohmann::json::array();
    for (const std::string& p : outputs) {
      nlohmann::json o;
      o["path"] = p;
      o["bytes"] = static_cast<std::uint64_t>(std::filesystem::file_size(p));
      o["fnv64"] = hex64(file_fnv64(p));
      j["outputs"].push_back(o);
    }
    j["wall_clock_sec"] = wall_clock_sec;
    return j;
  }

  void write(const std::string& path, bool force) const {
    ensure_can_write(path, force);
    std::ofstream out(path);
    if (!out) fail(errc::bad_config, "cannot open " + path);
    out << to_json().dump(2) << "\n";
  }
};

}  // namespace wavetail
