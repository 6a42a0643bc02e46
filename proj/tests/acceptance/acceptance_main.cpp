// Acceptance gate: one line per criterion, exit 0 iff all pass.
// Each criterion states its tolerance inline; nothing here is tunable from
// the command line on purpose -- this binary IS the contract.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "../oracles.hpp"
#include "wavetail/canonical.hpp"
#include "wavetail/dyadic.hpp"
#include "wavetail/evolve.hpp"
#include "wavetail/fit.hpp"
#include "wavetail/norms.hpp"
#include "wavetail/resolvent.hpp"
#include "wavetail/synthesis.hpp"
#include "wavetail/zerofreq.hpp"

using namespace wavetail;
using oracle::cd;

namespace {

int g_failures = 0;

template <class F>
void run_criterion(int id, F&& body) {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  std::string detail;
  try {
    std::pair<bool, std::string> r = body();
    ok = r.first;
    detail = r.second;
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("C%-2d %s — %s  [%.1fs]\n", id, ok ? "PASS" : "FAIL", detail.c_str(), sec);
  std::fflush(stdout);
  if (!ok) ++g_failures;
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

ModePotential flat_line() {
  return ModePotential::direct("flat_line", [](double) { return 0.0; }, false);
}

std::vector<cd> sample_src(const RadialGrid& g, double c, double w) {
  std::vector<cd> s(g.n);
  for (int i = 0; i < g.n; ++i) s[i] = cd(gaussian(g.x(i), c, w), 0.0);
  return s;
}

double l2c(double h, const std::vector<cd>& v) {
  double s = 0.0;
  for (const cd& z : v) s += std::norm(z);
  return std::sqrt(h * s);
}

// ------------------------------------------------------------------ shared
// C1-C3 read the same long Schwarzschild run.

struct LongRun {
  EvolveResult res;
  double seconds = 0.0;
};

const LongRun& long_run() {
  static LongRun lr = [] {
    auto t0 = std::chrono::steady_clock::now();
    auto chart = normalize_coordinates(schwarzschild(1.0));
    ModePotential pot = mode_potential(chart, 0);
    EvolutionConfig cfg;
    cfg.rho_min = -1150.0;
    cfg.rho_max = 2250.0;
    cfg.h = 0.05;
    cfg.t_final = 2200.0;
    cfg.observers = {10.0};
    cfg.rays = {20.0, 50.0, 100.0};
    cfg.energy_stride = 0;
    cfg.data = DataSpec{DataSpec::gaussian_time_symmetric, 20.0, 2.0, 1.0, 8.0};
    LongRun out;
    out.res = evolve(pot, cfg);
    out.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }();
  return lr;
}

// ------------------------------------------------------------------ criteria

std::pair<bool, std::string> c1_field_tail() {
  const LongRun& lr = long_run();
  DecayFit f = fit_decay(lr.res.obs_phi[0], 200.0, 2000.0);
  bool ok = std::abs(f.p - 3.0) <= 0.15 && f.drift < 0.1 && lr.seconds < 600.0;
  return {ok, fmt("field exponent p=%.3f (3.0±0.15), lld drift=%.3f (<0.1), run %.0fs (<600)",
                  f.p, f.drift, lr.seconds)};
}

std::pair<bool, std::string> c2_velocity_tail() {
  const LongRun& lr = long_run();
  DecayFit f = fit_decay(lr.res.obs_dphi[0], 200.0, 2000.0);
  bool ok = std::abs(f.p - 4.0) <= 0.2;
  return {ok, fmt("time-derivative exponent p=%.3f (4.0±0.2), drift=%.3f", f.p, f.drift)};
}

std::pair<bool, std::string> c3_cone_bound() {
  const LongRun& lr = long_run();
  std::string d = "ray ratios";
  bool ok = true;
  for (std::size_t j = 0; j < lr.res.ray_offsets.size(); ++j) {
    ConeProfile cp = cone_profile(lr.res.ray_u[j], lr.res.ray_offsets[j]);
    ok = ok && cp.ratio < 1.5;
    d += fmt(" c=%g:%.3f", lr.res.ray_offsets[j], cp.ratio);
  }
  return {ok, d + " (<1.5)"};
}

std::pair<bool, std::string> c4_flat_quiescence() {
  auto chart = normalize_coordinates(minkowski());
  ModePotential pot = mode_potential(chart, 0);
  EvolutionConfig cfg;
  cfg.rho_min = 0.0;
  cfg.rho_max = 170.0;
  cfg.h = 0.01;
  cfg.t_final = 150.0;
  cfg.observers = {10.0};
  cfg.energy_stride = 0;
  cfg.data = DataSpec{DataSpec::gaussian_time_symmetric, 20.0, 3.0, 1.0, 8.0};
  EvolveResult res = evolve(pot, cfg);
  double late = 0.0;
  const TimeSeries& s = res.obs_phi[0];
  for (std::size_t k = 0; k < s.size(); ++k)
    if (s.t(k) >= 80.0) late = std::max(late, std::abs(s.v[k]));
  return {late < 1e-10, fmt("flat-space residue after passage %.2e (<1e-10)", late)};
}

std::pair<bool, std::string> c5_resolvent_oracle() {
  ModePotential pot = flat_line();
  std::function<double(double)> gsrc = [](double x) { return gaussian(x, 0.0, 2.0); };
  bool ok = true;
  std::string d;
  for (double tr : {0.1, 1.0, 10.0}) {
    cd tau(tr, 0.0);
    RadialGrid g = RadialGrid::over(-40.0, 40.0, tr > 5.0 ? 0.005 : 0.02);
    ResolventSolution sol = resolvent_apply(pot, tau, g, sample_src(g, 0.0, 2.0));
    double num = 0.0, den = 0.0;
    int stride = std::max(1, g.n / 150);
    for (int i = 0; i < g.n; i += stride) {
      cd ref = oracle::flat_line_resolvent(gsrc, -40.0, 40.0, tau, g.x(i));
      num += std::norm(sol.v[i] - ref);
      den += std::norm(ref);
    }
    double rel = std::sqrt(num / den);
    ok = ok && rel < 1e-6;
    d += fmt("tau=%g:%.1e ", tr, rel);
  }

  // lower-half-plane energy bound at 20 reproducible pseudo-random points
  auto chart = normalize_coordinates(schwarzschild(1.0));
  ModePotential schw = mode_potential(chart, 0);
  RadialGrid g = RadialGrid::over(-60.0, 100.0, 0.05);
  std::vector<cd> src = sample_src(g, 20.0, 2.0);
  double gn = l2c(g.h, src);
  std::mt19937 rng(12345);
  auto unit = [&] { return std::ldexp(double(rng()), -32); };
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    cd tau(-3.0 + 6.0 * unit(), -1.5 + 1.45 * unit());
    ResolventSolution sol = resolvent_apply(schw, tau, g, src);
    double bound = gn / (std::abs(tau) * std::abs(tau.imag()));
    worst = std::max(worst, l2c(g.h, sol.v) / bound);
  }
  ok = ok && worst < 1.0 + 1e-6;
  return {ok, fmt("kernel rel-L2 %s(<1e-6); energy-bound worst margin %.3f (<1)", d.c_str(),
                  worst)};
}

std::pair<bool, std::string> c6_radiation_condition() {
  auto chart = normalize_coordinates(schwarzschild(1.0));
  ModePotential pot = mode_potential(chart, 0);
  RadialGrid g = RadialGrid::over(-60.0, 4200.0, 0.05);
  DyadicPartition part = dyadic_partition(g, pot);
  bool ok = true;
  std::string d = "worst shell-decay factor";
  for (double tr : {0.25, 0.5, 1.0, 2.0}) {
    ResolventSolution sol = resolvent_apply(pot, cd(tr, 0.0), g, sample_src(g, 20.0, 2.0));
    RadiationReport rep = radiation_check(sol, pot, part);
    std::size_t m = rep.shell.size();
    double worst = 0.0;
    for (std::size_t j = m - 4; j < m; ++j)
      worst = std::max(worst, rep.defect_abs[j] / rep.defect_abs[j - 1]);
    ok = ok && worst <= 0.5 && !rep.ingoing_contamination;
    d += fmt(" tau=%g:%.3f", tr, worst);
  }
  return {ok, d + " (<=0.5)"};
}

std::pair<bool, std::string> c7_uniform_bound() {
  auto chart = normalize_coordinates(schwarzschild(1.0));
  ModePotential pot = mode_potential(chart, 0);
  std::function<cd(double)> src = [](double x) { return cd(gaussian(x, 20.0, 2.0), 0.0); };
  std::vector<double> taus;
  for (int j = 0; j < 40; ++j)
    taus.push_back(1e-3 * std::pow(10.0 / 1e-3, j / 39.0));
  MonitorReport rep = le_tau_bound_monitor(pot, -60.0, 80.0, src, taus);
  double lo = 1e300, hi = 0.0;
  for (const MonitorPoint& p : rep.pts) {
    lo = std::min(lo, p.ratio);
    hi = std::max(hi, p.ratio);
  }
  bool ok = hi / lo < 10.0 && !rep.any_flagged;

  // control: an attractive well with a trapped state must be flagged
  ModePotential well = ModePotential::direct(
      "sech2_well", [](double x) { double c = std::cosh(x - 20.0); return -5.0 / (c * c); },
      false);
  RadialGrid g = RadialGrid::over(-20.0, 60.0, 0.05);
  std::vector<cd> wsrc = sample_src(g, 20.0, 2.0);
  DyadicPartition part = dyadic_partition(g, well);
  std::vector<double> ratios;
  for (double s : {0.3, 0.45, 0.6, oracle::sech5_kappa1 * 0.997, 0.95, 1.2}) {
    cd tau(0.0, -s);
    ResolventSolution sol = resolvent_apply(well, tau, g, wsrc);
    ComplexField vf{g, sol.v}, gf{g, sol.src};
    ratios.push_back(le_tau_norm(vf, tau, part).value * std::max(1.0, std::abs(tau)) /
                     le_tau_dual_norm(gf, part));
  }
  std::vector<double> sorted = ratios;
  std::sort(sorted.begin(), sorted.end());
  double median = sorted[sorted.size() / 2];
  double peak = sorted.back();
  bool flagged = peak > 10.0 * median;
  ok = ok && flagged;
  return {ok, fmt("sweep spread %.2f (<10), unflagged; control peak/median %.0f (>10, flagged)",
                  hi / lo, peak / median)};
}

std::pair<bool, std::string> c8_zero_resolvent() {
  std::function<double(double)> chi = [](double s) { return bump_chi(s, 0.35, 0.3); };
  std::function<double(double)> s2chi = [&](double s) { return s * s * chi(s); };
  double pi4 = 4.0 * std::acos(-1.0);
  double amp = 1.0 / (pi4 * oracle::quad<double>(s2chi, 0.0, 0.8, 1e-13));
  ModePotential half = ModePotential::direct("flat_half", [](double) { return 0.0; }, true, 0);
  RadialGrid g = RadialGrid::over(0.0, 60.0, 0.01);
  std::vector<double> src(g.n);
  for (int i = 0; i < g.n; ++i) src[i] = g.x(i) * amp * chi(g.x(i));
  ZeroSolution zs = zero_resolvent(half, g, src);
  bool mono_ok = std::abs(zs.c - oracle::monopole_unit_mass) <= 1e-4;

  auto chart = normalize_coordinates(schwarzschild(1.0));
  ModePotential pot = mode_potential(chart, 0);
  RadialGrid gs = RadialGrid::over(-60.0, 4000.0, 0.05);
  std::vector<double> ssrc(gs.n);
  for (int i = 0; i < gs.n; ++i) ssrc[i] = gaussian(gs.x(i), 20.0, 2.0);
  ZeroSolution zschw = zero_resolvent(pot, gs, ssrc);
  bool drift_ok = zschw.c_drift < 0.01;
  return {mono_ok && drift_ok,
          fmt("monopole c=%.8f (1/4pi±1e-4); far-field drift %.4f (<0.01)", zs.c,
              zschw.c_drift)};
}

std::pair<bool, std::string> c9_low_freq() {
  std::function<double(double)> zero = [](double) { return 0.0; };
  std::function<double(double)> u1 = [](double s) { return gaussian(s, 20.0, 2.0); };
  ModePotential half = ModePotential::direct("flat_half", [](double) { return 0.0; }, true, 0);
  LowFreqReport flat = low_freq_expansion(half, 0.0, 400.0, zero, u1);
  auto chart = normalize_coordinates(schwarzschild(1.0));
  LowFreqReport schw = low_freq_expansion(mode_potential(chart, 0), -60.0, 400.0, zero, u1);
  bool ok = flat.slope1 >= 0.95 && flat.slope2 >= 1.8 && schw.slope1 >= 0.95 &&
            schw.slope2 >= 1.7;
  return {ok, fmt("flat slopes %.2f/%.2f (>=0.95/1.8); schwarzschild %.2f/%.2f (>=0.95/1.7)",
                  flat.slope1, flat.slope2, schw.slope1, schw.slope2)};
}

std::pair<bool, std::string> c10_pipeline_closure() {
  struct Config {
    const char* label;
    bool schw;
    int ell;
  };
  std::vector<Config> configs = {
      {"mink l0", false, 0}, {"mink l1", false, 1}, {"schw l0", true, 0}, {"schw l1", true, 1}};
  auto mink = normalize_coordinates(minkowski());
  auto schw = normalize_coordinates(schwarzschild(1.0));

  bool ok = true;
  std::string d;
  for (const Config& c : configs) {
    ModePotential pot = mode_potential(c.schw ? schw : mink, c.ell);
    double lo = pot.case_a() ? 0.0 : -60.0;
    EvolutionConfig cfg;
    cfg.rho_min = lo;
    cfg.rho_max = pot.case_a() ? 170.0 : 160.0;
    cfg.h = 0.025;
    cfg.t_final = 108.0;
    cfg.observers = {50.0};
    cfg.energy_stride = 0;
    cfg.data = DataSpec{DataSpec::gaussian_velocity, 20.0, 2.0, 1.0, 8.0};
    EvolveResult ev = evolve(pot, cfg);

    std::function<double(double)> zero = [](double) { return 0.0; };
    std::function<double(double)> u1 = [](double x) { return gaussian(x, 20.0, 2.0); };
    SynthesisPlan plan = make_synthesis_plan(110.0, suggested_tau_max(2.0));
    SynthesisResult syn =
        synthesize(pot, plan, lo, cfg.rho_max, zero, u1, {50.0}, 0.0, 0.25, 433);
    double rel = compare_series(syn.u[0], ev.obs_phi[0], 0.0, 100.0).rel_l2;
    ok = ok && rel < 0.01;
    d += fmt("%s:%.4f ", c.label, rel);
  }
  return {ok, "synthesis vs evolution rel-L2 " + d + "(<0.01)"};
}

std::pair<bool, std::string> c11_convergence_order() {
  auto chart = normalize_coordinates(schwarzschild(1.0));
  ModePotential pot = mode_potential(chart, 0);
  auto run = [&](double h) {
    EvolutionConfig cfg;
    cfg.rho_min = -100.0;
    cfg.rho_max = 100.0;
    cfg.h = h;
    cfg.t_final = 60.0;
    cfg.observers = {10.0};
    cfg.energy_stride = 0;
    cfg.data = DataSpec{DataSpec::gaussian_time_symmetric, 20.0, 2.0, 1.0, 8.0};
    return evolve(pot, cfg).obs_phi[0];
  };
  TimeSeries coarse = run(0.2), mid = run(0.1), fine = run(0.05);
  double e1 = compare_series(mid, coarse, 0.0, 60.0).rel_l2;
  double e2 = compare_series(fine, mid, 0.0, 60.0).rel_l2;
  double order = std::log2(e1 / e2);
  return {order >= 3.5 && order <= 4.5,
          fmt("measured order %.2f (in [3.5,4.5]), e(2h)=%.2e e(h)=%.2e", order, e1, e2)};
}

}  // namespace

int main() {
  std::printf("wavetail acceptance suite\n");
  auto t0 = std::chrono::steady_clock::now();
  run_criterion(1, c1_field_tail);
  run_criterion(2, c2_velocity_tail);
  run_criterion(3, c3_cone_bound);
  run_criterion(4, c4_flat_quiescence);
  run_criterion(5, c5_resolvent_oracle);
  run_criterion(6, c6_radiation_condition);
  run_criterion(7, c7_uniform_bound);
  run_criterion(8, c8_zero_resolvent);
  run_criterion(9, c9_low_freq);
  run_criterion(10, c10_pipeline_closure);
  run_criterion(11, c11_convergence_order);
  double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d/11 criteria passed  [total %.0fs]\n", 11 - g_failures, sec);
  return g_failures == 0 ? 0 : 1;
}
