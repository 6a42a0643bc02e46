#pragma once
// Late-time decay-rate estimation.  The primary quantity is the power p in
// |phi(t)| ~ t^{-p}, read off as minus the least-squares slope of ln|phi|
// against ln t over a caller-chosen window.  A sliding local fit (half-width
// 0.15 decades) gives the local logarithmic derivative; its spread over the
// final half-decade of the window is reported as "drift" and is the
// convergence diagnostic: a clean power law has drift -> 0.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wavetail/common.hpp"
#include "wavetail/grid.hpp"
#include "wavetail/spline.hpp"

namespace wavetail {

struct DecayFit {
  double p = 0.0;      // decay exponent (sign-flipped global slope)
  double drift = 0.0;  // max - min of the local slope over the final half-decade
  double window_a = 0.0, window_b = 0.0;
  std::vector<double> lld_t;      // centers of the sliding windows
  std::vector<double> lld_slope;  // local d ln|phi| / d ln t  (≈ -p)
};

namespace detail {

// Log-spaced resample of |s| on [a, b]; throws on sign changes inside the
// window (the power-law readout is meaningless across a zero crossing).
inline void log_samples(const TimeSeries& s, double a, double b, int m,
                        std::vector<double>& lt, std::vector<double>& lv) {
  int sign = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    double t = s.t(k);
    if (t < a || t > b) continue;
    double v = s.v[k];
    if (v == 0.0) continue;
    int sg = v > 0 ? 1 : -1;
    if (sign == 0) sign = sg;
    else if (sg != sign)
      fail(errc::sign_change, "signal changes sign inside fit window [" +
                                  std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  if (sign == 0) fail(errc::sign_change, "signal vanishes on fit window");
  lt.resize(m);
  lv.resize(m);
  double la = std::log(a), lb = std::log(b);
  for (int j = 0; j < m; ++j) {
    double L = la + (lb - la) * j / (m - 1);
    double t = std::exp(L);
    std::size_t k = static_cast<std::size_t>(std::floor((t - s.t0) / s.dt));
    double v = interp_cubic(s.t0, s.dt, s.v, t);
    (void)k;
    lt[j] = L;
    lv[j] = std::log(std::abs(v) + 1e-300);
  }
}

}  // namespace detail

inline DecayFit fit_decay(const TimeSeries& s, double t_a, double t_b) {
  if (!(t_a > 0.0) || !(t_b > t_a)) fail(errc::bad_config, "fit window must satisfy 0 < a < b");
  t_a = std::max(t_a, s.t0 + 2 * s.dt);
  t_b = std::min(t_b, s.t0 + (s.size() - 3) * s.dt);
  if (t_b / t_a < 9.9)
    fail(errc::insufficient_decade, "fit window [" + std::to_string(t_a) + ", " +
                                        std::to_string(t_b) + "] spans less than a decade");
  const int m = 1200;
  std::vector<double> lt, lv;
  detail::log_samples(s, t_a, t_b, m, lt, lv);

  DecayFit f;
  f.window_a = t_a;
  f.window_b = t_b;
  LinFit glob = linear_fit(lt, lv);
  f.p = -glob.slope;

  // sliding local slope, half-width 0.15 decades in log10 = 0.15*ln10 in ln
  const double hw = 0.15 * std::log(10.0);
  double span = lt.back() - lt.front();
  int wpts = std::max(4, static_cast<int>(2 * hw / span * (m - 1)));
  for (int j = 0; j + wpts < m; ++j) {
    std::vector<double> xs(lt.begin() + j, lt.begin() + j + wpts + 1);
    std::vector<double> ys(lv.begin() + j, lv.begin() + j + wpts + 1);
    LinFit lf = linear_fit(xs, ys);
    f.lld_t.push_back(std::exp(0.5 * (xs.front() + xs.back())));
    f.lld_slope.push_back(lf.slope);
  }

  // drift over the final half-decade of window centers
  double t_half = t_b / std::sqrt(10.0);
  double lo = 1e300, hi = -1e300;
  int count = 0;
  for (std::size_t j = 0; j < f.lld_t.size(); ++j) {
    if (f.lld_t[j] < t_half) continue;
    lo = std::min(lo, f.lld_slope[j]);
    hi = std::max(hi, f.lld_slope[j]);
    ++count;
  }
  if (count < 3) fail(errc::insufficient_decade, "too few local-slope samples in final half-decade");
  f.drift = hi - lo;
  return f;
}

// Automatic window: largest trailing window [t_a, t_b] (t_b = 0.98 of the
// series end) spanning at least a decade whose local slope stays within
// `slope_tol` of its final value.  Falls back to the full tail if no window
// settles; the caller reads `drift` to judge the fit.
inline DecayFit fit_decay_auto(const TimeSeries& s, double slope_tol = 0.3) {
  double t_end = s.t0 + (s.size() - 3) * s.dt;
  double t_b = 0.98 * t_end;
  double t_min = std::max(s.t0 + 2 * s.dt, 1e-6);
  if (t_b / t_min < 9.9)
    fail(errc::insufficient_decade, "series too short for a one-decade fit window");
  // probe fit over the full usable range to locate the settled region
  DecayFit probe = fit_decay(s, t_min, t_b);
  double target = probe.lld_slope.back();
  double t_a = t_min;
  for (std::size_t j = probe.lld_t.size(); j-- > 0;) {
    if (std::abs(probe.lld_slope[j] - target) > slope_tol) {
      t_a = probe.lld_t[j];
      break;
    }
  }
  t_a = std::max(t_a, t_min);
  if (t_b / t_a < 10.0) t_a = t_b / 10.0;
  if (t_a < t_min) t_a = t_min;
  return fit_decay(s, t_a, t_b);
}

// Profile along an outgoing ray rho = t - c: the compensated amplitude
// P(t) = |u| * <2t - c> * <c>^2 should be bounded above uniformly in t if the
// wave-zone envelope holds.  Reports sup P over the first and last dyadic
// t-windows of the sampled ray.
struct ConeProfile {
  std::vector<double> t;
  std::vector<double> P;
  double sup_first = 0.0, sup_last = 0.0;
  double ratio = 0.0;  // sup_last / sup_first
};

inline ConeProfile cone_profile(const Curve& ray, double c) {
  ConeProfile cp;
  if (ray.t.size() < 8) fail(errc::insufficient_decade, "ray sample too short");
  double wc = smooth_abs(c);
  for (std::size_t k = 0; k < ray.t.size(); ++k) {
    double t = ray.t[k];
    if (t < c) continue;  // profile is read in the wave zone t > c
    cp.t.push_back(t);
    cp.P.push_back(std::abs(ray.v[k]) * smooth_abs(2.0 * t - c) * wc * wc);
  }
  if (cp.t.size() < 8) fail(errc::insufficient_decade, "ray enters wave zone too late");
  double t0 = cp.t.front(), t1 = cp.t.back();
  if (t1 < 4.0 * t0) fail(errc::insufficient_decade, "ray spans fewer than two dyads");
  for (std::size_t k = 0; k < cp.t.size(); ++k) {
    if (cp.t[k] <= 2.0 * t0) cp.sup_first = std::max(cp.sup_first, cp.P[k]);
    if (cp.t[k] >= 0.5 * t1) cp.sup_last = std::max(cp.sup_last, cp.P[k]);
  }
  cp.ratio = cp.sup_last / (cp.sup_first + 1e-300);
  return cp;
}

}  // namespace wavetail
