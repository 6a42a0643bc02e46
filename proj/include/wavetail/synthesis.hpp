#pragma once
// Time-domain reconstruction from frequency-domain solves:
//     u(t) = (1/pi) Re  integral_0^inf  e^{i tau t}  uhat(tau)  d tau,
//     uhat = R_tau ( u1 + i tau u0 ),
// quadratured over a panel plan: dyadic Clenshaw-Curtis panels
// [2^{-k}, 2^{-k+1}] for k = k_deep..2 (resolving the low-frequency wedge
// that carries the late-time behavior), then uniform-width panels up to
// tau_max (set by the data's spectral content).  Node counts grow with the panel's
// phase load width * t_max; the conjugate-frequency half-line is folded in
// by the Re, which is what makes uhat(-tau) = conj(uhat(tau)) a checkable
// invariant rather than an assumption of the quadrature.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "wavetail/canonical.hpp"
#include "wavetail/common.hpp"
#include "wavetail/grid.hpp"
#include "wavetail/resolvent.hpp"
#include "wavetail/spline.hpp"

namespace wavetail {

struct QuadPanel {
  double a = 0.0, b = 0.0;
  std::vector<double> tau;
  std::vector<double> w;
};

struct SynthesisPlan {
  std::vector<QuadPanel> panels;
  double t_max = 0.0;
  double tau_max = 0.0;
  int k_deep = 14;

  std::size_t total_nodes() const {
    std::size_t n = 0;
    for (const auto& p : panels) n += p.tau.size();
    return n;
  }
};

namespace detail {

// Clenshaw-Curtis nodes/weights on [a, b] with n points (n >= 2).
inline QuadPanel cc_panel(double a, double b, int n) {
  QuadPanel p;
  p.a = a;
  p.b = b;
  int N = n - 1;
  p.tau.resize(n);
  p.w.resize(n);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int j = 0; j <= N; ++j) {
    double th = pi * j / N;
    p.tau[j] = mid - half * std::cos(th);  // ascending in tau
    double s = 1.0;
    for (int k = 1; k <= N / 2; ++k) {
      double bk = (2 * k == N) ? 1.0 : 2.0;
      s -= bk * std::cos(2.0 * k * th) / (4.0 * k * k - 1.0);
    }
    double cj = (j == 0 || j == N) ? 1.0 : 2.0;
    p.w[j] = half * cj * s / N;
  }
  return p;
}

inline int panel_nodes(double width, double t_max, int refine) {
  int n = static_cast<int>(std::ceil(1.2 * width * t_max / pi)) + 8;
  n = std::clamp(n, 8, 96);
  return refine > 1 ? refine * n - (refine - 1) : n;  // doubling keeps endpoints nested
}

}  // namespace detail

// tau_max for Gaussian data of the given width: spectrum e^{-tau^2 w^2 / 4}
// down to ~1e-8, rounded up to the 0.25 panel lattice.
inline double suggested_tau_max(double data_width) {
  double t = 2.0 * std::sqrt(std::log(1e8)) / std::max(data_width, 1e-3);
  return std::ceil(t / 0.25) * 0.25;
}

inline SynthesisPlan make_synthesis_plan(double t_max, double tau_max, int refine = 1,
                                         int k_deep = 14) {
  if (tau_max < 0.5) fail(errc::bad_config, "synthesis needs tau_max >= 0.5");
  SynthesisPlan plan;
  plan.t_max = t_max;
  plan.tau_max = std::ceil(tau_max / 0.25) * 0.25;
  plan.k_deep = k_deep;
  for (int k = k_deep; k >= 2; --k) {
    double a = std::pow(2.0, -k), b = std::pow(2.0, -k + 1);
    plan.panels.push_back(detail::cc_panel(a, b, detail::panel_nodes(b - a, t_max, refine)));
  }
  for (double a = 0.5; a < plan.tau_max - 1e-12; a += 0.25)
    plan.panels.push_back(detail::cc_panel(a, a + 0.25, detail::panel_nodes(0.25, t_max, refine)));
  return plan;
}

struct SynthesisResult {
  std::vector<double> observers;
  std::vector<TimeSeries> u;                // per observer
  std::vector<double> node_tau;             // flattened plan nodes
  std::vector<std::vector<cd>> node_uhat;   // [observer][node]
  std::size_t solves = 0;
};

// Solve uhat = R_tau (u1 + i tau u0) at every plan node and assemble the
// observer time series.  The solve lattice is rebuilt per node so the
// per-wavelength resolution stays fixed across the plan.
inline SynthesisResult synthesize(const ModePotential& pot, const SynthesisPlan& plan,
                                  double rho_min, double rho_max,
                                  const std::function<double(double)>& u0,
                                  const std::function<double(double)>& u1,
                                  const std::vector<double>& observers, double t0, double dt,
                                  int nt, const AccuracyProfile& prof = loose_profile) {
  SynthesisResult res;
  res.observers = observers;
  res.u.assign(observers.size(), TimeSeries{t0, dt, std::vector<double>(nt, 0.0)});
  res.node_uhat.assign(observers.size(), {});

  double x0 = pot.case_a() ? 0.0 : rho_min;
  for (const QuadPanel& p : plan.panels) {
    for (std::size_t j = 0; j < p.tau.size(); ++j) {
      double tau = p.tau[j];
      double h = detail::monitor_lattice_h(tau);
      RadialGrid g = RadialGrid::over(x0, rho_max, h);
      std::vector<cd> src(g.n);
      for (int i = 0; i < g.n; ++i) src[i] = cd(u1(g.x(i)), tau * u0(g.x(i)));
      ResolventSolution sol = resolvent_apply(pot, cd(tau, 0.0), g, std::move(src), prof);
      ++res.solves;
      res.node_tau.push_back(tau);
      for (std::size_t m = 0; m < observers.size(); ++m) {
        cd uh = interp_cubic(g.x0, g.h, sol.v, observers[m]);
        res.node_uhat[m].push_back(uh);
        TimeSeries& ts = res.u[m];
        for (int k = 0; k < nt; ++k) {
          double t = ts.t(k);
          ts.v[k] += p.w[j] * (std::cos(tau * t) * uh.real() - std::sin(tau * t) * uh.imag()) / pi;
        }
      }
    }
  }
  return res;
}

// Relative L2 discrepancy between two series over [t_lo, t_hi], resampling b
// onto a's timestamps.
struct SeriesDiff {
  double rel_l2 = 0.0;
  double sup_abs = 0.0;
  double ref_l2 = 0.0;
};

inline SeriesDiff compare_series(const TimeSeries& a, const TimeSeries& b, double t_lo,
                                 double t_hi) {
  SeriesDiff d;
  double acc = 0.0, ref = 0.0;
  int used = 0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    double t = a.t(k);
    if (t < t_lo || t > t_hi) continue;
    if (t < b.t0 + 2 * b.dt || t > b.t0 + (b.size() - 3) * b.dt) continue;
    double bv = interp_cubic(b.t0, b.dt, b.v, t);
    double diff = a.v[k] - bv;
    acc += diff * diff;
    ref += bv * bv;
    d.sup_abs = std::max(d.sup_abs, std::abs(diff));
    ++used;
  }
  if (used < 8) fail(errc::bad_config, "compare_series: overlap window too small");
  d.rel_l2 = std::sqrt(acc / (ref + 1e-300));
  d.ref_l2 = std::sqrt(ref);
  return d;
}

}  // namespace wavetail
