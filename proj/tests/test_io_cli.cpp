#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "testutil.hpp"
#include "wavetail/campaign.hpp"
#include "wavetail/io.hpp"

using namespace wavetail;
namespace fs = std::filesystem;

namespace {

const std::string kDir = "io_tmp";

std::string tmp(const std::string& leaf) { return kDir + "/" + leaf; }

struct DirGuard {
  DirGuard() {
    fs::remove_all(kDir);
    fs::create_directories(kDir);
  }
};

std::map<std::string, std::string> output_checksums(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  REQUIRE(in.good());
  nlohmann::json m = nlohmann::json::parse(in);
  std::map<std::string, std::string> sums;
  for (const auto& o : m.at("outputs")) {
    std::string p = o.at("path").get<std::string>();
    sums[fs::path(p).filename().string()] = o.at("fnv64").get<std::string>();
  }
  return sums;
}

}  // namespace

TEST_CASE("text series round-trip bit exactly") {
  DirGuard guard;
  TimeSeries s{0.125, 1.0 / 3.0, {1.0 / 7.0, -2.718281828459045e-17, 3.14159265358979312, 0.0}};
  write_series(tmp("s.dat"), s);
  TimeSeries r = read_series(tmp("s.dat"));
  REQUIRE(r.t0 == s.t0);
  REQUIRE(r.dt == s.dt);
  REQUIRE(r.v == s.v);

  Curve c{{0.0, 0.5, 1.75}, {9.9e-300, -1.0 / 3.0, 5.0e280}};
  write_curve(tmp("c.dat"), c);
  Curve rc = read_curve(tmp("c.dat"));
  REQUIRE(rc.t == c.t);
  REQUIRE(rc.v == c.v);
}

TEST_CASE("ragged cadence is rejected when read back as a series") {
  DirGuard guard;
  Curve c{{0.0, 1.0, 2.5}, {1.0, 2.0, 3.0}};
  write_curve(tmp("ragged.dat"), c);
  REQUIRE(testutil::thrown_code([&] { read_series(tmp("ragged.dat")); }) == errc::bad_config);
}

TEST_CASE("binary snapshots round-trip") {
  DirGuard guard;
  Snapshot s;
  s.t = 12.5;
  s.g = RadialGrid::over(-4.0, 4.0, 0.25);
  for (int i = 0; i < s.g.n; ++i) {
    s.phi.push_back(gaussian(s.g.x(i), 0.0, 1.0));
    s.pi.push_back(-0.3 * s.phi.back());
  }
  write_snapshot(tmp("s.bin"), s);
  Snapshot r = read_snapshot(tmp("s.bin"));
  REQUIRE(r.t == s.t);
  REQUIRE(r.g.x0 == s.g.x0);
  REQUIRE(r.g.h == s.g.h);
  REQUIRE(r.g.n == s.g.n);
  REQUIRE(r.phi == s.phi);
  REQUIRE(r.pi == s.pi);
}

TEST_CASE("existing files are never silently overwritten") {
  DirGuard guard;
  TimeSeries s{0.0, 1.0, {1.0, 2.0}};
  write_series(tmp("keep.dat"), s);
  REQUIRE(testutil::thrown_code([&] { write_series(tmp("keep.dat"), s); }) ==
          errc::overwrite_refused);
  REQUIRE_NOTHROW(write_series(tmp("keep.dat"), s, /*force=*/true));
}

TEST_CASE("file checksums agree with the in-memory hash") {
  DirGuard guard;
  std::string payload = "wavetail checksum probe\n\x01\x02";
  {
    std::ofstream out(tmp("h.bin"), std::ios::binary);
    out << payload;
  }
  REQUIRE(file_fnv64(tmp("h.bin")) == fnv1a(payload));
}

TEST_CASE("manifests inventory their outputs with checksums") {
  DirGuard guard;
  TimeSeries s{0.0, 0.5, {1.0, 4.0, 9.0}};
  write_series(tmp("out.dat"), s);

  RunManifest m;
  m.config = {{"ell", 0}, {"note", "probe"}};
  m.stages = {"one"};
  m.stage_seconds = {{"one", 0.25}};
  m.outputs = {tmp("out.dat")};
  nlohmann::json j = m.to_json();

  REQUIRE(j.at("code_version").get<std::string>() == code_version);
  REQUIRE(j.at("config_fnv64").get<std::string>() == hex64(fnv1a(m.config.dump())));
  REQUIRE(j.at("stages").size() == 1);
  REQUIRE(j.at("outputs").size() == 1);
  REQUIRE(j.at("outputs")[0].at("bytes").get<std::uint64_t>() ==
          std::uint64_t(fs::file_size(tmp("out.dat"))));
  REQUIRE(j.at("outputs")[0].at("fnv64").get<std::string>() ==
          hex64(file_fnv64(tmp("out.dat"))));

  // config json survives a serialization round trip unchanged
  REQUIRE(nlohmann::json::parse(m.config.dump()) == m.config);
}

TEST_CASE("an empty campaign produces a manifest and nothing else") {
  DirGuard guard;
  nlohmann::json cfg;
  cfg["output_dir"] = tmp("empty");
  cfg["background"] = {{"name", "minkowski"}};
  cfg["stages"] = nlohmann::json::array();
  run_campaign(cfg);

  std::vector<std::string> leaves;
  for (const auto& e : fs::directory_iterator(tmp("empty")))
    leaves.push_back(e.path().filename().string());
  REQUIRE(leaves == std::vector<std::string>{"manifest.json"});
}

TEST_CASE("re-running a campaign reproduces every output checksum") {
  DirGuard guard;
  nlohmann::json cfg;
  cfg["background"] = {{"name", "schwarzschild"}, {"mass", 1.0}};
  cfg["ell"] = 0;
  nlohmann::json ev = {{"kind", "evolve"},   {"name", "ev"},
                       {"grid", {-40.0, 60.0}}, {"h", 0.1},
                       {"t_final", 30.0},    {"observers", {10.0}},
                       {"energy_stride", 1},
                       {"source", {{"center", 20.0}, {"width", 2.0}}}};
  nlohmann::json rv = {{"kind", "resolve"},
                       {"name", "rv"},
                       {"grid", {-40.0, 60.0}},
                       {"tau", 0.5},
                       {"source", {{"center", 20.0}, {"width", 2.0}}}};
  cfg["stages"] = {nlohmann::json{{"kind", "normalize"}, {"name", "norm"}}, ev, rv};

  cfg["output_dir"] = tmp("capA");
  run_campaign(cfg);
  cfg["output_dir"] = tmp("capB");
  run_campaign(cfg);

  auto a = output_checksums(tmp("capA") + "/manifest.json");
  auto b = output_checksums(tmp("capB") + "/manifest.json");
  REQUIRE(a.size() >= 5);
  REQUIRE(a == b);

  // without the explicit flag a completed run directory is off limits
  cfg["output_dir"] = tmp("capA");
  REQUIRE(testutil::thrown_code([&] { run_campaign(cfg); }) == errc::overwrite_refused);
  REQUIRE_NOTHROW(run_campaign(cfg, /*force_cli=*/true));
}
