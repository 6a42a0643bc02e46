#pragma once
// Stationary spherically symmetric backgrounds, described through the
// long-range deviations of the inverse metric from flat:
//   g^tt = -1 + tt(r),  g^rr = 1 + rr(r),  g^rt = rt(r),  r^2 g^ww = 1 + ww(r).
// Symbol-class requirement: |c(r)| <= C/r with each r-derivative gaining a
// power (checked numerically by verify_decay).

#include <cmath>
#include <functional>
#include <string>

#include "wavetail/common.hpp"

namespace wavetail {

using rfun = std::function<double(double)>;

struct BackgroundMetric {
  std::string name;
  double mass = 0.0;     // normalization scale M (0 for flat)
  double rmin = 0.0;     // inner chart boundary (horizon radius, or 0 for a regular center)
  bool regular_center = true;  // r=0 belongs to the chart
  rfun tt, rr, rt, ww;         // long-range deviations
  rfun d_tt, d_rr, d_rt, d_ww; // analytic first r-derivatives
};

inline BackgroundMetric minkowski() {
  auto zero = [](double) { return 0.0; };
  BackgroundMetric bg;
  bg.name = "minkowski";
  bg.mass = 0.0;
  bg.rmin = 0.0;
  bg.regular_center = true;
  bg.tt = bg.rr = bg.rt = bg.ww = zero;
  bg.d_tt = bg.d_rr = bg.d_rt = bg.d_ww = zero;
  return bg;
}

inline BackgroundMetric schwarzschild(double M) {
  if (!(M > 0)) fail(errc::bad_config, "schwarzschild: mass must be positive");
  BackgroundMetric bg;
  bg.name = "schwarzschild";
  bg.mass = M;
  bg.rmin = 2.0 * M;
  bg.regular_center = false;
  bg.tt = [M](double r) { return -2.0 * M / (r - 2.0 * M); };
  bg.rr = [M](double r) { return -2.0 * M / r; };
  bg.rt = [](double) { return 0.0; };
  bg.ww = [](double) { return 0.0; };
  bg.d_tt = [M](double r) { double d = r - 2.0 * M; return 2.0 * M / (d * d); };
  bg.d_rr = [M](double r) { return 2.0 * M / (r * r); };
  bg.d_rt = [](double) { return 0.0; };
  bg.d_ww = [](double) { return 0.0; };
  return bg;
}

// Arbitrary radial background; derivatives default to central differences.
inline BackgroundMetric custom_radial(std::string name, double mass, double rmin,
                                      bool regular_center, rfun tt, rfun rr, rfun rt, rfun ww,
                                      rfun d_tt = nullptr, rfun d_rr = nullptr,
                                      rfun d_rt = nullptr, rfun d_ww = nullptr) {
  auto fd = [](const rfun& f) {
    return [f](double r) {
      double h = 1e-5 * (1.0 + std::abs(r));
      return (f(r - 2 * h) - 8 * f(r - h) + 8 * f(r + h) - f(r + 2 * h)) / (12 * h);
    };
  };
  BackgroundMetric bg;
  bg.name = std::move(name);
  bg.mass = mass;
  bg.rmin = rmin;
  bg.regular_center = regular_center;
  bg.tt = std::move(tt); bg.rr = std::move(rr); bg.rt = std::move(rt); bg.ww = std::move(ww);
  bg.d_tt = d_tt ? std::move(d_tt) : fd(bg.tt);
  bg.d_rr = d_rr ? std::move(d_rr) : fd(bg.rr);
  bg.d_rt = d_rt ? std::move(d_rt) : fd(bg.rt);
  bg.d_ww = d_ww ? std::move(d_ww) : fd(bg.ww);
  return bg;
}

// Numerical symbol-class check on dyadic radii: |c(r)| r, |c'(r)| r^2, |c''| r^3
// must stay below `bound` out to r ~ 2^26 * scale. Throws DecayViolation.
inline void verify_decay(const BackgroundMetric& bg, double bound = 64.0) {
  double scale = std::max(1.0, 4.0 * bg.mass);
  const rfun* cs[4] = {&bg.tt, &bg.rr, &bg.rt, &bg.ww};
  const rfun* ds[4] = {&bg.d_tt, &bg.d_rr, &bg.d_rt, &bg.d_ww};
  const char* names[4] = {"tt", "rr", "rt", "ww"};
  for (int j = 0; j < 4; ++j) {
    for (int k = 2; k <= 26; ++k) {
      double r = scale * std::pow(2.0, k);
      double c = (*cs[j])(r), d = (*ds[j])(r);
      double hh = 1e-4 * r;
      double dd = ((*ds[j])(r + hh) - (*ds[j])(r - hh)) / (2 * hh);
      if (std::abs(c) * r > bound || std::abs(d) * r * r > bound ||
          std::abs(dd) * r * r * r > 8.0 * bound)
        fail(errc::decay_violation,
             std::string(names[j]) + " fails symbol-class decay at r=" + std::to_string(r));
    }
  }
}

}  // namespace wavetail
