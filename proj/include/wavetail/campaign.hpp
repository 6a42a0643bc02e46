#pragma once
// Config-driven batch runs.  A campaign JSON names a background, a mode
// number, and a list of stages; each stage writes its data products under
// output_dir and contributes scalar results to a per-stage report.  The run
// manifest (config + hash, output inventory with checksums, wall-clock) is
// written last.  Stage reports contain no timing, so a rerun of the same
// config reproduces every output byte-for-byte; only the manifest's
// wall_clock fields differ.
//
// Stage kinds: normalize, evolve, resolve, sweep_le, sweep_pointwise, zero,
// lowfreq, synthesize, compare, fit.  An empty stage list still produces a
// manifest.

#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavetail/background.hpp"
#include "wavetail/canonical.hpp"
#include "wavetail/common.hpp"
#include "wavetail/evolve.hpp"
#include "wavetail/fit.hpp"
#include "wavetail/io.hpp"
#include "wavetail/resolvent.hpp"
#include "wavetail/synthesis.hpp"
#include "wavetail/zerofreq.hpp"

namespace wavetail {

using nlohmann::json;

struct SourceSpec {
  std::string shape = "gaussian";  // gaussian | bump
  std::string mode = "time_symmetric";  // time_symmetric | outgoing | velocity
  double center = 20.0, width = 2.0, amplitude = 1.0;

  static SourceSpec parse(const json& j) {
    SourceSpec s;
    if (j.contains("shape")) s.shape = j.at("shape").get<std::string>();
    if (j.contains("mode")) s.mode = j.at("mode").get<std::string>();
    if (j.contains("center")) s.center = j.at("center").get<double>();
    if (j.contains("width")) s.width = j.at("width").get<double>();
    if (j.contains("amplitude")) s.amplitude = j.at("amplitude").get<double>();
    if (s.shape != "gaussian" && s.shape != "bump") fail(errc::bad_config, "unknown source shape " + s.shape);
    if (s.mode != "time_symmetric" && s.mode != "outgoing" && s.mode != "velocity")
      fail(errc::bad_config, "unknown source mode " + s.mode);
    return s;
  }

  double profile(double x) const {
    return shape == "bump" ? amplitude * bump_chi(x, center, width)
                           : amplitude * gaussian(x, center, width);
  }
  double dprofile(double x) const {
    if (shape == "bump") {
      double h = 1e-6 * (1.0 + std::abs(width));
      return amplitude * (bump_chi(x + h, center, width) - bump_chi(x - h, center, width)) /
             (2.0 * h);
    }
    return amplitude * gaussian(x, center, width) * (-2.0 * (x - center) / (width * width));
  }
  // initial data at the u-equation level
  std::function<double(double)> u0() const {
    if (mode == "velocity") return [](double) { return 0.0; };
    return [*this](double x) { return profile(x); };
  }
  std::function<double(double)> u1() const {
    if (mode == "velocity") return [*this](double x) { return profile(x); };
    if (mode == "outgoing") return [*this](double x) { return -dprofile(x); };
    return [](double) { return 0.0; };
  }
  DataSpec data_spec() const {
    DataSpec d;
    d.center = center;
    d.width = width;
    d.amplitude = amplitude;
    d.kind = mode == "velocity"   ? DataSpec::gaussian_velocity
             : mode == "outgoing" ? DataSpec::gaussian_outgoing
                                  : DataSpec::gaussian_time_symmetric;
    return d;
  }
};

namespace detail {

inline BackgroundMetric background_from_json(const json& j) {
  std::string name = j.value("name", "minkowski");
  if (name == "minkowski") return minkowski();
  if (name == "schwarzschild") return schwarzschild(j.value("mass", 1.0));
  fail(errc::bad_config, "unknown background " + name);
}

inline std::pair<double, double> grid_from_json(const json& j, const char* key = "grid") {
  if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 2)
    fail(errc::bad_config, std::string("stage needs \"") + key + "\": [min, max]");
  return {j.at(key)[0].get<double>(), j.at(key)[1].get<double>()};
}

inline AccuracyProfile profile_from_json(const json& j) {
  std::string p = j.value("profile", "tight");
  if (p == "tight") return tight_profile;
  if (p == "loose") return loose_profile;
  fail(errc::bad_config, "unknown accuracy profile " + p);
}

}  // namespace detail

class Campaign {
 public:
  Campaign(json cfg, bool force_cli) : cfg_(std::move(cfg)) {
    force_ = force_cli || cfg_.value("force", false);
    out_dir_ = cfg_.value("output_dir", std::string("out"));
    BackgroundMetric bg = detail::background_from_json(cfg_.value("background", json::object()));
    verify_decay(bg);
    chart_ = normalize_coordinates(bg);
    ell_ = cfg_.value("ell", 0);
    pot_ = mode_potential(chart_, ell_);
    manifest_.config = cfg_;
  }

  void run() {
    auto t_start = std::chrono::steady_clock::now();
    for (const json& st : cfg_.value("stages", json::array())) {
      std::string kind = st.value("kind", std::string());
      std::string name = st.value("name", kind);
      auto t0 = std::chrono::steady_clock::now();
      dispatch(kind, name, st);
      double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      manifest_.stages.push_back(name);
      manifest_.stage_seconds.emplace_back(name, sec);
    }
    manifest_.wall_clock_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    manifest_.write(path("manifest.json"), true);
  }

  const ModePotential& potential() const { return pot_; }

 private:
  std::string path(const std::string& leaf) const { return out_dir_ + "/" + leaf; }

  void emit_report(const std::string& name, const json& body) {
    std::string p = path(name + "_report.json");
    ensure_can_write(p, force_);
    std::ofstream out(p);
    out << body.dump(2) << "\n";
    manifest_.outputs.push_back(p);
  }

  void dispatch(const std::string& kind, const std::string& name, const json& st) {
    if (kind == "normalize") return stage_normalize(name, st);
    if (kind == "evolve") return stage_evolve(name, st);
    if (kind == "resolve") return stage_resolve(name, st);
    if (kind == "sweep_le") return stage_sweep(name, st, true);
    if (kind == "sweep_pointwise") return stage_sweep(name, st, false);
    if (kind == "zero") return stage_zero(name, st);
    if (kind == "lowfreq") return stage_lowfreq(name, st);
    if (kind == "synthesize") return stage_synthesize(name, st);
    if (kind == "compare") return stage_compare(name, st);
    if (kind == "fit") return stage_fit(name, st);
    fail(errc::bad_config, "unknown stage kind " + kind);
  }

  void stage_normalize(const std::string& name, const json& st) {
    json rep;
    rep["background"] = chart_.background().name;
    rep["mass"] = chart_.mass();
    rep["r_match"] = chart_.r_match();
    rep["regular_center"] = chart_.regular_center();
    json probes = json::array();
    for (double r : st.value("probes", std::vector<double>{4.0, 10.0, 100.0})) {
      json p;
      p["r"] = r;
      p["rho"] = chart_.rho_of_r(r);
      p["V"] = pot_.V_exact(chart_.rho_of_r(r));
      p["residual_tt_rr"] = chart_.residual_tt_rr(r);
      p["residual_cross"] = chart_.residual_cross(r);
      probes.push_back(p);
    }
    rep["probes"] = probes;
    emit_report(name, rep);
  }

  void stage_evolve(const std::string& name, const json& st) {
    auto [a, b] = detail::grid_from_json(st);
    SourceSpec src = SourceSpec::parse(st.value("source", json::object()));
    EvolutionConfig ec;
    ec.rho_min = a;
    ec.rho_max = b;
    ec.h = st.value("h", 0.05);
    ec.cfl = st.value("cfl", 0.8);
    ec.t_final = st.value("t_final", 100.0);
    ec.observers = st.value("observers", std::vector<double>{});
    ec.rays = st.value("rays", std::vector<double>{});
    ec.snapshot_stride = st.value("snapshot_stride", 0);
    ec.energy_stride = st.value("energy_stride", 0);
    ec.enforce_clean_window = st.value("enforce_clean_window", true);
    ec.data = src.data_spec();
    EvolveResult er = evolve(pot_, ec);
    for (std::size_t j = 0; j < ec.observers.size(); ++j) {
      std::string p = path(name + "_obs_" + std::to_string(j) + ".dat");
      write_series(p, er.obs_phi[j], force_);
      manifest_.outputs.push_back(p);
      p = path(name + "_dobs_" + std::to_string(j) + ".dat");
      write_series(p, er.obs_dphi[j], force_);
      manifest_.outputs.push_back(p);
    }
    for (std::size_t j = 0; j < ec.rays.size(); ++j) {
      std::string p = path(name + "_ray_" + std::to_string(j) + ".dat");
      write_curve(p, er.ray_u[j], force_);
      manifest_.outputs.push_back(p);
    }
    if (ec.energy_stride > 0) {
      std::string p = path(name + "_energy.dat");
      write_series(p, er.energy, force_);
      manifest_.outputs.push_back(p);
    }
    for (std::size_t j = 0; j < er.snapshots.size(); ++j) {
      std::string p = path(name + "_snap_" + std::to_string(j) + ".bin");
      write_snapshot(p, er.snapshots[j], force_);
      manifest_.outputs.push_back(p);
    }
    json rep;
    rep["dt"] = er.dt;
    rep["steps"] = er.steps;
    rep["observers"] = ec.observers;
    rep["rays"] = ec.rays;
    emit_report(name, rep);
  }

  void stage_resolve(const std::string& name, const json& st) {
    auto [a, b] = detail::grid_from_json(st);
    AccuracyProfile prof = detail::profile_from_json(st);
    double tre = 0.0, tim = 0.0;
    if (st.at("tau").is_array()) {
      tre = st.at("tau")[0].get<double>();
      tim = st.at("tau")[1].get<double>();
    } else {
      tre = st.at("tau").get<double>();
    }
    cd tau(tre, tim);
    SourceSpec src = SourceSpec::parse(st.value("source", json::object()));
    double h = st.value("h", detail::monitor_lattice_h(std::abs(tau)));
    double x0 = pot_.case_a() ? 0.0 : a;
    RadialGrid g = RadialGrid::over(x0, b, h);
    auto u0 = src.u0(), u1 = src.u1();
    std::vector<cd> gv(g.n);
    for (int i = 0; i < g.n; ++i) gv[i] = cd(u1(g.x(i)), 0.0) + cd(0.0, 1.0) * tau * u0(g.x(i));
    ResolventSolution sol = resolvent_apply(pot_, tau, g, std::move(gv), prof);
    DyadicPartition part = dyadic_partition(g, pot_);
    RadiationReport rr = radiation_check(sol, pot_, part);
    std::string p = path(name + "_v.dat");
    write_complex_field(p, g, sol.v, force_);
    manifest_.outputs.push_back(p);
    json rep;
    rep["tau"] = {tau.real(), tau.imag()};
    rep["wronskian"] = {sol.jost.W.real(), sol.jost.W.imag()};
    rep["wronskian_drift"] = sol.jost.wdrift;
    rep["match_radius"] = sol.jost.R_match;
    rep["residual_rel"] = resolvent_residual(sol, pot_, part);
    rep["radiation_rel_defects"] = rr.defect_rel;
    rep["ingoing_contamination"] = rr.ingoing_contamination;
    emit_report(name, rep);
  }

  void stage_sweep(const std::string& name, const json& st, bool le_kind) {
    auto [a, b] = detail::grid_from_json(st);
    AccuracyProfile prof = detail::profile_from_json(st);
    std::vector<double> taus;
    if (st.contains("tau_log")) {
      auto tl = st.at("tau_log");  // [lo, hi, count]
      double lo = tl[0].get<double>(), hi = tl[1].get<double>();
      int m = tl[2].get<int>();
      for (int j = 0; j < m; ++j)
        taus.push_back(lo * std::pow(hi / lo, m == 1 ? 0.0 : double(j) / (m - 1)));
    } else {
      taus = st.at("taus").get<std::vector<double>>();
    }
    SourceSpec src = SourceSpec::parse(st.value("source", json::object()));
    // sweep sources are frequency-independent: use the profile directly
    std::function<cd(double)> gfn = [src](double x) { return cd(src.profile(x), 0.0); };
    MonitorReport rep = le_kind ? le_tau_bound_monitor(pot_, a, b, gfn, taus, prof)
                                : pointwise_bound_monitor(pot_, a, b, gfn, taus, prof);
    std::string p = path(name + "_table.dat");
    ensure_can_write(p, force_);
    {
      std::ofstream out(p);
      for (const MonitorPoint& q : rep.pts)
        out << io_fmt(q.tau, q.ratio, q.flagged ? 1.0 : 0.0);
    }
    manifest_.outputs.push_back(p);
    json jr;
    jr["median"] = rep.median;
    jr["max_ratio"] = rep.max_ratio;
    jr["spread"] = rep.max_ratio / (rep.median + 1e-300);
    jr["any_flagged"] = rep.any_flagged;
    emit_report(name, jr);
  }

  void stage_zero(const std::string& name, const json& st) {
    auto [a, b] = detail::grid_from_json(st);
    AccuracyProfile prof = detail::profile_from_json(st);
    SourceSpec src = SourceSpec::parse(st.value("source", json::object()));
    double x0 = pot_.case_a() ? 0.0 : a;
    RadialGrid g = RadialGrid::over(x0, b, st.value("h", 0.05));
    auto u1 = src.u1();
    std::vector<double> gv(g.n);
    bool use_u1 = st.value("use_u1", false);
    for (int i = 0; i < g.n; ++i) gv[i] = use_u1 ? u1(g.x(i)) : src.profile(g.x(i));
    ZeroSolution zs = zero_resolvent(pot_, g, gv, prof);
    std::string p = path(name + "_v0.dat");
    write_real_field(p, g, zs.v, force_);
    manifest_.outputs.push_back(p);
    json rep;
    rep["c"] = zs.c;
    rep["c_drift"] = zs.c_drift;
    rep["wronskian_drift"] = zs.wdrift;
    rep["shell_rms"] = zs.shell_rms;
    emit_report(name, rep);
  }

  void stage_lowfreq(const std::string& name, const json& st) {
    auto [a, b] = detail::grid_from_json(st);
    AccuracyProfile prof = detail::profile_from_json(st);
    SourceSpec src = SourceSpec::parse(st.value("source", json::object()));
    LowFreqReport lr = low_freq_expansion(pot_, a, b, src.u0(), src.u1(), prof,
                                          st.value("meas_max", 120.0));
    json rep;
    rep["slope1"] = lr.slope1;
    rep["slope2"] = lr.slope2;
    rep["null_ratio"] = lr.null_ratio;
    rep["taus"] = lr.taus;
    rep["w1_norm"] = lr.w1_norm;
    rep["w2_norm"] = lr.w2_norm;
    json tails = json::array();
    for (double obs : st.value("observers", std::vector<double>{})) {
      TailPrediction tp = tail_from_low_freq(lr, obs);
      json t;
      t["rho"] = obs;
      t["a"] = tp.a;
      t["negligible"] = tp.negligible;
      t["exponent"] = tp.exponent;
      tails.push_back(t);
    }
    rep["tails"] = tails;
    std::string p = path(name + "_a.dat");
    write_real_field(p, lr.g, lr.a_field, force_);
    manifest_.outputs.push_back(p);
    emit_report(name, rep);
  }

  void stage_synthesize(const std::string& name, const json& st) {
    auto [a, b] = detail::grid_from_json(st);
    AccuracyProfile prof = st.contains("profile") ? detail::profile_from_json(st) : loose_profile;
    SourceSpec src = SourceSpec::parse(st.value("source", json::object()));
    double t_max = st.value("t_max", 100.0);
    double tau_max = st.value("tau_max", suggested_tau_max(src.width));
    SynthesisPlan plan = make_synthesis_plan(t_max, tau_max, st.value("refine", 1));
    std::vector<double> obs = st.value("observers", std::vector<double>{});
    double dt = st.value("dt", 0.1);
    int nt = static_cast<int>(std::floor(t_max / dt)) + 1;
    SynthesisResult sr = synthesize(pot_, plan, a, b, src.u0(), src.u1(), obs, 0.0, dt, nt, prof);
    for (std::size_t j = 0; j < obs.size(); ++j) {
      std::string p = path(name + "_u_" + std::to_string(j) + ".dat");
      write_series(p, sr.u[j], force_);
      manifest_.outputs.push_back(p);
    }
    json rep;
    rep["solves"] = sr.solves;
    rep["tau_max"] = plan.tau_max;
    rep["panels"] = plan.panels.size();
    emit_report(name, rep);
  }

  void stage_compare(const std::string& name, const json& st) {
    TimeSeries sa = read_series(path(st.at("a").get<std::string>()));
    TimeSeries sb = read_series(path(st.at("b").get<std::string>()));
    auto [lo, hi] = detail::grid_from_json(st, "window");
    SeriesDiff d = compare_series(sa, sb, lo, hi);
    json rep;
    rep["rel_l2"] = d.rel_l2;
    rep["sup_abs"] = d.sup_abs;
    emit_report(name, rep);
  }

  void stage_fit(const std::string& name, const json& st) {
    TimeSeries s = read_series(path(st.at("series").get<std::string>()));
    DecayFit f;
    if (st.contains("window")) {
      auto [lo, hi] = detail::grid_from_json(st, "window");
      f = fit_decay(s, lo, hi);
    } else {
      f = fit_decay_auto(s);
    }
    json rep;
    rep["p"] = f.p;
    rep["drift"] = f.drift;
    rep["window"] = {f.window_a, f.window_b};
    emit_report(name, rep);
  }

  static std::string io_fmt(double a, double b, double c) { return detail::fmt17(a, b, c); }

  json cfg_;
  bool force_ = false;
  std::string out_dir_;
  int ell_ = 0;
  NormalizedChart chart_;
  ModePotential pot_;
  RunManifest manifest_;
};

inline void run_campaign(const json& cfg, bool force_cli = false) {
  Campaign c(cfg, force_cli);
  c.run();
}

}  // namespace wavetail
