// Command-line front end.  Subcommands map one-to-one onto the library
// entry points; `campaign` runs a JSON-driven batch and writes a manifest.

#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavetail/background.hpp"
#include "wavetail/campaign.hpp"
#include "wavetail/canonical.hpp"
#include "wavetail/evolve.hpp"
#include "wavetail/fit.hpp"
#include "wavetail/io.hpp"
#include "wavetail/resolvent.hpp"
#include "wavetail/synthesis.hpp"
#include "wavetail/zerofreq.hpp"

namespace {

using namespace wavetail;
using nlohmann::json;

std::vector<double> split_colon(const std::string& s) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t next = s.find(':', pos);
    std::string tok = s.substr(pos, next == std::string::npos ? next : next - pos);
    if (!tok.empty()) out.push_back(std::stod(tok));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

// "--source bump:20:2[:amp]" / "gauss:20:2[:amp]"
SourceSpec parse_source(const std::string& s) {
  SourceSpec spec;
  std::size_t c = s.find(':');
  std::string shape = c == std::string::npos ? s : s.substr(0, c);
  if (shape == "gauss" || shape == "gaussian") spec.shape = "gaussian";
  else if (shape == "bump") spec.shape = "bump";
  else fail(errc::bad_config, "unknown source shape " + shape);
  if (c != std::string::npos) {
    std::vector<double> v = split_colon(s.substr(c + 1));
    if (v.size() >= 1) spec.center = v[0];
    if (v.size() >= 2) spec.width = v[1];
    if (v.size() >= 3) spec.amplitude = v[2];
  }
  return spec;
}

struct CommonOpts {
  std::string background = "minkowski";
  double mass = 1.0;
  int ell = 0;
  std::string grid = "-60:200:0.05";
  std::string source = "gauss:20:2";
  std::string profile = "tight";
  bool force = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_grid = true) {
  cmd->add_option("--background", o.background, "minkowski | schwarzschild");
  cmd->add_option("--mass", o.mass, "background mass (schwarzschild)");
  cmd->add_option("--ell", o.ell, "spherical-harmonic mode number");
  if (with_grid) cmd->add_option("--grid", o.grid, "rho_min:rho_max[:h]");
  cmd->add_option("--source", o.source, "shape:center:width[:amp], shape in {gauss,bump}");
  cmd->add_option("--profile", o.profile, "accuracy profile: tight | loose");
  cmd->add_flag("--force", o.force, "overwrite existing outputs");
}

ModePotential make_potential(const CommonOpts& o, NormalizedChart* chart_out = nullptr) {
  BackgroundMetric bg =
      o.background == "minkowski" ? minkowski() : schwarzschild(o.mass);
  if (o.background != "minkowski" && o.background != "schwarzschild")
    fail(errc::bad_config, "unknown background " + o.background);
  verify_decay(bg);
  NormalizedChart chart = normalize_coordinates(bg);
  if (chart_out) *chart_out = chart;
  return mode_potential(chart, o.ell);
}

AccuracyProfile profile_of(const CommonOpts& o) {
  if (o.profile == "tight") return tight_profile;
  if (o.profile == "loose") return loose_profile;
  fail(errc::bad_config, "unknown profile " + o.profile);
}

struct GridSpec {
  double a, b, h;
};

GridSpec parse_grid(const std::string& s, double default_h) {
  std::vector<double> v = split_colon(s);
  if (v.size() < 2) fail(errc::bad_config, "--grid wants rho_min:rho_max[:h]");
  return {v[0], v[1], v.size() >= 3 ? v[2] : default_h};
}

int cmd_normalize(const CommonOpts& o, const std::vector<double>& probes) {
  NormalizedChart chart;
  ModePotential pot = make_potential(o, &chart);
  std::printf("background    %s (mass %.17g)\n", chart.background().name.c_str(), chart.mass());
  std::printf("center        %s\n", chart.regular_center() ? "regular (half line)" : "horizon-type (whole line)");
  std::printf("anchor        rho(%.17g) = %.17g\n", chart.r_match(), chart.rho_of_r(chart.r_match()));
  for (double r : probes) {
    double rho = chart.rho_of_r(r);
    std::printf("r = %-10.6g rho = %-22.17g V_l%d = %-22.17g\n", r, rho, o.ell,
                pot.V_exact(rho));
    std::printf("              residual_tt_rr = %.3e  residual_cross = %.3e\n",
                chart.residual_tt_rr(r), chart.residual_cross(r));
  }
  return 0;
}

int cmd_evolve(const CommonOpts& o, double t_final, double cfl,
               const std::vector<double>& observers, const std::vector<double>& rays,
               const std::string& out_dir) {
  ModePotential pot = make_potential(o);
  GridSpec gs = parse_grid(o.grid, 0.05);
  SourceSpec src = parse_source(o.source);
  EvolutionConfig ec;
  ec.rho_min = gs.a;
  ec.rho_max = gs.b;
  ec.h = gs.h;
  ec.cfl = cfl;
  ec.t_final = t_final;
  ec.observers = observers;
  ec.rays = rays;
  ec.energy_stride = 0;
  ec.data = src.data_spec();
  EvolveResult er = evolve(pot, ec);
  std::printf("evolved %d steps, dt = %.17g, grid n = %d\n", er.steps, er.dt, er.g.n);
  for (std::size_t j = 0; j < observers.size(); ++j) {
    std::string p = out_dir + "/obs_" + std::to_string(j) + ".dat";
    write_series(p, er.obs_phi[j], o.force);
    std::printf("wrote %s (%zu samples)\n", p.c_str(), er.obs_phi[j].size());
  }
  for (std::size_t j = 0; j < rays.size(); ++j) {
    std::string p = out_dir + "/ray_" + std::to_string(j) + ".dat";
    write_curve(p, er.ray_u[j], o.force);
    std::printf("wrote %s (%zu samples)\n", p.c_str(), er.ray_u[j].t.size());
  }
  return 0;
}

int cmd_resolve(const CommonOpts& o, const std::string& tau_str, const std::string& out_file) {
  ModePotential pot = make_potential(o);
  GridSpec gs = parse_grid(o.grid, 0.05);
  std::vector<double> tv;
  {
    std::string t = tau_str;
    for (char& ch : t)
      if (ch == ',') ch = ':';
    tv = split_colon(t);
  }
  cd tau(tv.at(0), tv.size() > 1 ? tv[1] : 0.0);
  SourceSpec src = parse_source(o.source);
  double x0 = pot.case_a() ? 0.0 : gs.a;
  RadialGrid g = RadialGrid::over(x0, gs.b, std::min(gs.h, detail::monitor_lattice_h(std::abs(tau))));
  std::vector<cd> gv(g.n);
  for (int i = 0; i < g.n; ++i) gv[i] = cd(src.profile(g.x(i)), 0.0);
  ResolventSolution sol = resolvent_apply(pot, tau, g, std::move(gv), profile_of(o));
  DyadicPartition part = dyadic_partition(g, pot);
  RadiationReport rr = radiation_check(sol, pot, part);
  std::printf("tau = (%.17g, %.17g)\n", tau.real(), tau.imag());
  std::printf("W = (%.17g, %.17g), drift %.3e, match radius %.6g\n", sol.jost.W.real(),
              sol.jost.W.imag(), sol.jost.wdrift, sol.jost.R_match);
  std::printf("interior residual (relative, dual shell norm): %.3e\n",
              resolvent_residual(sol, pot, part));
  std::printf("outgoing-defect per shell (relative):");
  for (double d : rr.defect_rel) std::printf(" %.2e", d);
  std::printf("\ningoing contamination: %s\n", rr.ingoing_contamination ? "FLAGGED" : "no");
  if (!out_file.empty()) {
    write_complex_field(out_file, g, sol.v, o.force);
    std::printf("wrote %s\n", out_file.c_str());
  }
  return 0;
}

int cmd_sweep(const CommonOpts& o, const std::string& tau_log, bool pointwise,
              const std::string& out_file) {
  ModePotential pot = make_potential(o);
  GridSpec gs = parse_grid(o.grid, 0.05);
  std::vector<double> tl = split_colon(tau_log);
  if (tl.size() != 3) fail(errc::bad_config, "--tau-log wants lo:hi:count");
  std::vector<double> taus;
  int m = static_cast<int>(tl[2]);
  for (int j = 0; j < m; ++j)
    taus.push_back(tl[0] * std::pow(tl[1] / tl[0], m == 1 ? 0.0 : double(j) / (m - 1)));
  SourceSpec src = parse_source(o.source);
  std::function<cd(double)> gfn = [src](double x) { return cd(src.profile(x), 0.0); };
  MonitorReport rep = pointwise
                          ? pointwise_bound_monitor(pot, gs.a, gs.b, gfn, taus, profile_of(o))
                          : le_tau_bound_monitor(pot, gs.a, gs.b, gfn, taus, profile_of(o));
  std::printf("# tau        ratio        flagged\n");
  for (const MonitorPoint& p : rep.pts)
    std::printf("%-12.6g %-12.6g %d\n", p.tau, p.ratio, p.flagged ? 1 : 0);
  std::printf("median %.6g  max %.6g  spread %.3g  flagged %s\n", rep.median, rep.max_ratio,
              rep.max_ratio / (rep.median + 1e-300), rep.any_flagged ? "yes" : "no");
  if (!out_file.empty()) {
    ensure_can_write(out_file, o.force);
    std::ofstream out(out_file);
    for (const MonitorPoint& p : rep.pts)
      out << p.tau << " " << p.ratio << " " << (p.flagged ? 1 : 0) << "\n";
    std::printf("wrote %s\n", out_file.c_str());
  }
  return 0;
}

int cmd_zero(const CommonOpts& o, const std::string& out_file) {
  ModePotential pot = make_potential(o);
  GridSpec gs = parse_grid(o.grid, 0.05);
  SourceSpec src = parse_source(o.source);
  double x0 = pot.case_a() ? 0.0 : gs.a;
  RadialGrid g = RadialGrid::over(x0, gs.b, gs.h);
  std::vector<double> gv(g.n);
  for (int i = 0; i < g.n; ++i) gv[i] = src.profile(g.x(i));
  ZeroSolution zs = zero_resolvent(pot, g, gv, profile_of(o));
  std::printf("c (exterior coefficient) = %.17g\n", zs.c);
  std::printf("c drift over last decade = %.3e\n", zs.c_drift);
  std::printf("Wronskian drift          = %.3e\n", zs.wdrift);
  std::printf("shell RMS:");
  for (double r : zs.shell_rms) std::printf(" %.3e", r);
  std::printf("\n");
  if (!out_file.empty()) {
    write_real_field(out_file, g, zs.v, o.force);
    std::printf("wrote %s\n", out_file.c_str());
  }
  return 0;
}

int cmd_lowfreq(const CommonOpts& o, const std::vector<double>& observers) {
  ModePotential pot = make_potential(o);
  GridSpec gs = parse_grid(o.grid, 0.05);
  SourceSpec src = parse_source(o.source);
  LowFreqReport lr = low_freq_expansion(pot, gs.a, gs.b, src.u0(), src.u1(), profile_of(o));
  std::printf("first-order remainder slope  = %.4f\n", lr.slope1);
  std::printf("second-order remainder slope = %.4f\n", lr.slope2);
  std::printf("tau-linear null ratio        = %.3e\n", lr.null_ratio);
  for (double obs : observers) {
    TailPrediction tp = tail_from_low_freq(lr, obs);
    std::printf("rho = %-8.4g tail = %.17g / t^%d%s\n", obs, -tp.a, tp.exponent,
                tp.negligible ? "  (below threshold)" : "");
  }
  return 0;
}

int cmd_synthesize(const CommonOpts& o, double t_max, double dt,
                   const std::vector<double>& observers, const std::string& out_dir) {
  ModePotential pot = make_potential(o);
  GridSpec gs = parse_grid(o.grid, 0.05);
  SourceSpec src = parse_source(o.source);
  SynthesisPlan plan = make_synthesis_plan(t_max, suggested_tau_max(src.width));
  int nt = static_cast<int>(std::floor(t_max / dt)) + 1;
  SynthesisResult sr = synthesize(pot, plan, gs.a, gs.b, src.u0(), src.u1(), observers, 0.0,
                                  dt, nt, o.profile == "tight" ? tight_profile : loose_profile);
  std::printf("synthesized %zu observers from %zu solves (tau_max %.3g, %zu panels)\n",
              observers.size(), sr.solves, plan.tau_max, plan.panels.size());
  for (std::size_t j = 0; j < observers.size(); ++j) {
    std::string p = out_dir + "/synth_" + std::to_string(j) + ".dat";
    write_series(p, sr.u[j], o.force);
    std::printf("wrote %s\n", p.c_str());
  }
  return 0;
}

int cmd_compare(const std::string& fa, const std::string& fb, const std::string& window) {
  TimeSeries a = read_series(fa), b = read_series(fb);
  std::vector<double> w = split_colon(window);
  if (w.size() != 2) fail(errc::bad_config, "--window wants lo:hi");
  SeriesDiff d = compare_series(a, b, w[0], w[1]);
  std::printf("relative L2 difference on [%g, %g]: %.6e\n", w[0], w[1], d.rel_l2);
  std::printf("sup |a-b| = %.6e, reference L2 = %.6e\n", d.sup_abs, d.ref_l2);
  return 0;
}

int cmd_fit(const std::string& file, const std::string& window) {
  TimeSeries s = read_series(file);
  DecayFit f;
  if (window.empty()) {
    f = fit_decay_auto(s);
  } else {
    std::vector<double> w = split_colon(window);
    if (w.size() != 2) fail(errc::bad_config, "--window wants lo:hi");
    f = fit_decay(s, w[0], w[1]);
  }
  std::printf("decay exponent p = %.6f  (window [%g, %g])\n", f.p, f.window_a, f.window_b);
  std::printf("local-slope drift over final half-decade = %.6f\n", f.drift);
  return 0;
}

int cmd_campaign(const std::string& config_path, bool force) {
  std::ifstream in(config_path);
  if (!in) fail(errc::bad_config, "cannot open " + config_path);
  json cfg = json::parse(in);
  run_campaign(cfg, force);
  std::printf("campaign complete: %s\n",
              (cfg.value("output_dir", std::string("out")) + "/manifest.json").c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tortoise-coordinate wave tails: evolution, resolvent, synthesis"};
  app.require_subcommand(1);

  CommonOpts o;
  std::vector<double> probes{4.0};
  std::vector<double> observers, rays;
  double t_final = 100.0, cfl = 0.8, t_max = 100.0, dt = 0.1;
  std::string out_dir = ".", out_file, tau_str = "1", tau_log = "1e-3:10:40";
  std::string file_a, file_b, window;
  bool pointwise = false;
  std::string config_path;

  auto* c_norm = app.add_subcommand("normalize", "canonicalize a background chart");
  add_common(c_norm, o, false);
  c_norm->add_option("--probe", probes, "radii to report");

  auto* c_evl = app.add_subcommand("evolve", "time-domain evolution");
  add_common(c_evl, o);
  c_evl->add_option("--t-final", t_final);
  c_evl->add_option("--cfl", cfl);
  c_evl->add_option("--observer", observers, "tortoise radii to record");
  c_evl->add_option("--ray", rays, "outgoing-ray offsets c (rho = t - c)");
  c_evl->add_option("--out", out_dir, "output directory");

  auto* c_res = app.add_subcommand("resolve", "single frequency-domain solve");
  add_common(c_res, o);
  c_res->add_option("--tau", tau_str, "frequency re[,im]");
  c_res->add_option("--out", out_file, "write v as x Re Im");

  auto* c_swp = app.add_subcommand("resolve-sweep", "bound monitor over a tau range");
  add_common(c_swp, o);
  c_swp->add_option("--tau-log", tau_log, "lo:hi:count (log-spaced)");
  c_swp->add_flag("--pointwise", pointwise, "weighted sup-norm monitor instead of shell norm");
  c_swp->add_option("--out", out_file);

  auto* c_zero = app.add_subcommand("zero", "static (tau = 0) solve");
  add_common(c_zero, o);
  c_zero->add_option("--out", out_file);

  auto* c_low = app.add_subcommand("lowfreq", "low-frequency expansion and tail density");
  add_common(c_low, o);
  c_low->add_option("--observer", observers, "tortoise radii for tail coefficients");

  auto* c_syn = app.add_subcommand("synthesize", "time series from frequency solves");
  add_common(c_syn, o);
  c_syn->add_option("--t-max", t_max);
  c_syn->add_option("--dt", dt);
  c_syn->add_option("--observer", observers);
  c_syn->add_option("--out", out_dir);

  auto* c_cmp = app.add_subcommand("compare", "relative L2 distance of two series");
  c_cmp->add_option("a", file_a)->required();
  c_cmp->add_option("b", file_b)->required();
  c_cmp->add_option("--window", window, "lo:hi");

  auto* c_fit = app.add_subcommand("fit", "decay exponent of a series");
  c_fit->add_option("series", file_a)->required();
  c_fit->add_option("--window", window, "lo:hi (default: automatic)");

  auto* c_cmp2 = app.add_subcommand("campaign", "run a JSON-configured batch");
  c_cmp2->add_option("config", config_path)->required();
  c_cmp2->add_flag("--force", o.force);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_norm->parsed()) return cmd_normalize(o, probes);
    if (c_evl->parsed()) return cmd_evolve(o, t_final, cfl, observers, rays, out_dir);
    if (c_res->parsed()) return cmd_resolve(o, tau_str, out_file);
    if (c_swp->parsed()) return cmd_sweep(o, tau_log, pointwise, out_file);
    if (c_zero->parsed()) return cmd_zero(o, out_file);
    if (c_low->parsed()) return cmd_lowfreq(o, observers);
    if (c_syn->parsed()) return cmd_synthesize(o, t_max, dt, observers, out_dir);
    if (c_cmp->parsed()) return cmd_compare(file_a, file_b, window.empty() ? "0:1e300" : window);
    if (c_fit->parsed()) return cmd_fit(file_a, window);
    if (c_cmp2->parsed()) return cmd_campaign(config_path, o.force);
  } catch (const wavetail::failure& e) {
    std::fprintf(stderr, "error [%s]: %s\n", wavetail::errc_name(e.code()), e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
