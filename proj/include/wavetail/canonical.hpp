#pragma once
// Chart normalization and per-mode potentials.
//
// Given a background with inverse-metric deviations (tt, rr, rt, ww), the
// normalized chart (T, rho) kills the cross term with T = t + a(r),
// a'(r) = -rt/(1+rr), and picks the radial coordinate rho with
//   drho/dr = w(r) = sqrt(F/(1+rr)),   F = 1 - tt + rt^2/(1+rr),
// so that gT T + g rho rho = 0 identically.  On that chart each spherical
// harmonic amplitude phi = qtilde * u, qtilde = r (1+ww)^{-1/2}, obeys
//   d^2 phi/dT^2 - d^2 phi/drho^2 + V(rho) phi = 0,
//   V = qtilde''/qtilde + l(l+1) (1+ww) / (F r^2).
//
// Conventions (documented in README):
//  * Schwarzschild tortoise constant: rho = r + 2M ln(r/(2M) - 1).
//  * Tabulated horizon charts are anchored at rho(r_match) = r_match,
//    r_match = 4M (matching the closed form above); regular-center charts
//    are anchored at rho(0) = 0, where the centered solver machinery lives.

#include <cmath>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "wavetail/background.hpp"
#include "wavetail/common.hpp"
#include "wavetail/spline.hpp"

namespace wavetail {

namespace detail {

// Global Newton for the Schwarzschild tortoise inverse, solved in
// u = ln((r-2M)/(2M)) so the horizon side suffers no cancellation:
//   rho = 2M (1 + e^u + u).
// F is convex and increasing in u, so Newton from the right converges
// monotonically. Returns xi = r - 2M.
inline double schw_xi_of_rho(double rho, double M) {
  double s = rho / (2.0 * M) - 1.0;
  // Root of e^u + u = s. Both starts give g(u0) >= 0 (at or right of the
  // root): g(ln s) = ln s >= 0 for s > 1, g(s) = e^s > 0 otherwise.
  double u = (s > 1.0) ? std::log(s) : s;
  for (int it = 0; it < 200; ++it) {
    double eu = std::exp(u);
    double g = 1.0 + eu + u - rho / (2.0 * M);
    double du = g / (eu + 1.0);
    u -= du;
    if (std::abs(du) < 1e-16 * (1.0 + std::abs(u))) break;
  }
  return 2.0 * M * std::exp(u);
}

}  // namespace detail

class NormalizedChart {
 public:
  // ---- scalar functions of the original radial coordinate -----------------
  double F(double r) const {
    const auto& bg = p_->bg;
    double rr = bg.rr(r);
    double rt = bg.rt(r);
    return 1.0 - bg.tt(r) + rt * rt / (1.0 + rr);
  }
  double weight(double r) const {  // drho/dr
    double denom = 1.0 + p_->bg.rr(r);
    double f = F(r);
    if (!(denom > 0.0) || !(f > 0.0))
      fail(errc::non_monotone_tortoise, "weight undefined at r=" + std::to_string(r));
    return std::sqrt(f / denom);
  }
  double aprime(double r) const { return -p_->bg.rt(r) / (1.0 + p_->bg.rr(r)); }

  // ---- tortoise map --------------------------------------------------------
  double rho_of_r(double r) const {
    switch (p_->kind) {
      case Impl::FLAT: return r;
      case Impl::SCHW: {
        double M = p_->bg.mass;
        return r + 2.0 * M * std::log(r / (2.0 * M) - 1.0);
      }
      default: return p_->rho_s.eval(s_of_r(r));
    }
  }
  double r_of_rho(double rho) const {
    switch (p_->kind) {
      case Impl::FLAT: return rho;
      case Impl::SCHW: return 2.0 * p_->bg.mass + detail::schw_xi_of_rho(rho, p_->bg.mass);
      default:
        // Past the table top the weight is 1 + O(symbol decay): extend linearly.
        if (rho > p_->rho_top) return p_->r_top + (rho - p_->rho_top) / p_->w_top;
        return r_of_s(invert_s(rho));
    }
  }
  // r - rmin without cancellation (horizon charts).
  double excess_of_rho(double rho) const {
    switch (p_->kind) {
      case Impl::FLAT: return rho;
      case Impl::SCHW: return detail::schw_xi_of_rho(rho, p_->bg.mass);
      default: {
        if (rho > p_->rho_top)
          return (p_->r_top - p_->bg.rmin) + (rho - p_->rho_top) / p_->w_top;
        double s = invert_s(rho);
        return p_->horizon_kind ? p_->s0 * std::exp(s) : r_of_s(s);
      }
    }
  }

  // ---- diagnostics ---------------------------------------------------------
  // Residual of the normalization identities, evaluated through the
  // implemented functions (should vanish to roundoff):
  //   tilde g^{TT} + tilde g^{rho rho} and tilde g^{T rho}.
  double residual_tt_rr(double r) const {
    const auto& bg = p_->bg;
    double ap = aprime(r);
    double gtt = -1.0 + bg.tt(r) + 2.0 * ap * bg.rt(r) + ap * ap * (1.0 + bg.rr(r));
    double w = weight(r);
    double grho = w * w * (1.0 + bg.rr(r));
    return gtt + grho;
  }
  double residual_cross(double r) const {
    const auto& bg = p_->bg;
    return weight(r) * (bg.rt(r) + aprime(r) * (1.0 + bg.rr(r)));
  }

  // The chart itself, viewed as a background in the rho coordinate. Weight of
  // a repeated normalization is identically 1 (idempotence).
  BackgroundMetric as_background() const {
    NormalizedChart self = *this;
    auto ttf = [self](double rho) { return 1.0 - self.F(self.r_of_rho(rho)); };
    auto rrf = [self](double rho) { return self.F(self.r_of_rho(rho)) - 1.0; };
    auto zero = [](double) { return 0.0; };
    auto wwf = [self](double rho) {
      double r = self.r_of_rho(rho);
      if (r <= 0.0) return 0.0;
      return rho * rho * (1.0 + self.p_->bg.ww(r)) / (r * r) - 1.0;
    };
    BackgroundMetric out;
    out.name = p_->bg.name + ":normalized";
    out.mass = p_->bg.mass;
    out.regular_center = p_->bg.regular_center;
    out.rmin = p_->bg.regular_center ? 0.0 : -std::numeric_limits<double>::infinity();
    out.tt = ttf; out.rr = rrf; out.rt = zero; out.ww = wwf;
    out = custom_radial(out.name, out.mass, out.rmin, out.regular_center, out.tt, out.rr,
                        out.rt, out.ww);
    return out;
  }

  const BackgroundMetric& background() const { return p_->bg; }
  bool regular_center() const { return p_->bg.regular_center; }
  double mass() const { return p_->bg.mass; }
  double r_match() const { return p_->r_match; }

  // ---- construction --------------------------------------------------------
  friend NormalizedChart normalize_coordinates(const BackgroundMetric& bg);

 private:
  struct Impl {
    enum Kind { FLAT, SCHW, TABLE } kind = FLAT;
    BackgroundMetric bg;
    bool horizon_kind = false;  // TABLE: log parameterization around rmin
    double s0 = 1.0;
    double r_match = 1.0;
    CubicSpline rho_s;  // rho as a function of the parameter s
    double s_min = 0.0, s_max = 0.0;
    // top-of-table data for the linear extension of the inverse map
    double rho_top = 0.0, r_top = 0.0, w_top = 1.0;
  };

  double r_of_s(double s) const {
    return p_->horizon_kind ? p_->bg.rmin + p_->s0 * std::exp(s) : p_->s0 * std::sinh(s / p_->s0);
  }
  double s_of_r(double r) const {
    return p_->horizon_kind ? std::log((r - p_->bg.rmin) / p_->s0) : p_->s0 * std::asinh(r / p_->s0);
  }
  double invert_s(double rho) const {
    // rho_s is strictly increasing; Newton with bisection safeguard.
    double lo = p_->s_min, hi = p_->s_max;
    double rlo = p_->rho_s.eval(lo), rhi = p_->rho_s.eval(hi);
    if (rho <= rlo) return lo;
    if (rho >= rhi) fail(errc::bad_config, "tortoise inverse out of table range");
    double s = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
      double f = p_->rho_s.eval(s) - rho;
      if (f > 0) hi = s; else lo = s;
      double d = p_->rho_s.deriv(s);
      double sn = s - f / d;
      if (!(sn > lo && sn < hi)) sn = 0.5 * (lo + hi);
      if (std::abs(sn - s) < 1e-15 * (1.0 + std::abs(s))) { s = sn; break; }
      s = sn;
    }
    return s;
  }

  std::shared_ptr<const Impl> p_;
};

inline NormalizedChart normalize_coordinates(const BackgroundMetric& bg) {
  auto impl = std::make_shared<NormalizedChart::Impl>();
  impl->bg = bg;
  NormalizedChart chart;
  chart.p_ = impl;

  bool flat = bg.name == "minkowski";
  if (flat) {
    impl->kind = NormalizedChart::Impl::FLAT;
    impl->r_match = 1.0;
    return chart;
  }
  if (bg.name == "schwarzschild") {
    impl->kind = NormalizedChart::Impl::SCHW;
    impl->r_match = 4.0 * bg.mass;
    return chart;
  }

  // Generic tabulated chart. Parameterize the radial ray by s and integrate
  // drho/ds with the endpoint-corrected trapezoid, then anchor at r_match.
  impl->kind = NormalizedChart::Impl::TABLE;
  impl->horizon_kind = !bg.regular_center;
  impl->r_match = bg.mass > 0 ? 4.0 * bg.mass : 1.0;
  impl->s0 = impl->horizon_kind ? std::max(1.0, 2.0 * bg.mass) : 1.0;

  const double r_far = 3.0e5 * std::max(1.0, bg.mass);
  std::vector<double> s_nodes;
  if (impl->horizon_kind) {
    // Deep segment (coarse; integrand is constant to e^{-30}) + main segment.
    double s_hi = std::log((r_far - bg.rmin) / impl->s0);
    for (double s = -620.0; s < -30.0; s += 0.05) s_nodes.push_back(s);
    int n = static_cast<int>(std::ceil((s_hi + 30.0) / 7e-4));
    for (int i = 0; i <= n; ++i) s_nodes.push_back(-30.0 + (s_hi + 30.0) * double(i) / n);
  } else {
    double s_hi = impl->s0 * std::asinh(r_far / impl->s0);
    int n = static_cast<int>(std::ceil(s_hi / 7e-4));
    for (int i = 0; i <= n; ++i) s_nodes.push_back(s_hi * double(i) / n);
  }

  // drho/ds at the nodes; non-uniform spacing handled by integrating each
  // uniform piece separately would complicate anchoring, so resample the deep
  // piece is already uniform and the main piece uniform: integrate piecewise.
  auto r_of_s = [&](double s) {
    return impl->horizon_kind ? bg.rmin + impl->s0 * std::exp(s)
                              : impl->s0 * std::sinh(s / impl->s0);
  };
  auto drho_ds = [&](double s) -> double {
    double r = r_of_s(s);
    double denom = 1.0 + bg.rr(r);
    double rt = bg.rt(r);
    double f = 1.0 - bg.tt(r) + rt * rt / denom;
    if (!(denom > 0.0) || !(f > 0.0))
      fail(errc::non_monotone_tortoise,
           "drho/dr undefined or non-positive at r=" + std::to_string(r));
    double w = std::sqrt(f / denom);
    double jac = impl->horizon_kind ? impl->s0 * std::exp(s)
                                    : std::cosh(s / impl->s0);
    return w * jac;
  };

  // Cumulative integral over the (piecewise uniform) s mesh.
  std::vector<double> rho(s_nodes.size(), 0.0);
  std::size_t start = 0;
  double offset = 0.0;
  while (start + 1 < s_nodes.size()) {
    std::size_t end = start + 1;
    double h = s_nodes[start + 1] - s_nodes[start];
    // Spacing jitter within a uniform run is a few ulp of s_max; the deep and
    // main meshes differ by orders of magnitude, so 1e-6 separates cleanly.
    while (end + 1 < s_nodes.size() &&
           std::abs((s_nodes[end + 1] - s_nodes[end]) - h) < 1e-6 * std::abs(h))
      ++end;
    std::vector<double> f(end - start + 1);
    for (std::size_t i = start; i <= end; ++i) f[i - start] = drho_ds(s_nodes[i]);
    auto cum = cumulative_integral(h, f);
    for (std::size_t i = start; i <= end; ++i) rho[i] = offset + cum[i - start];
    offset = rho[end];
    start = end;
  }

  impl->s_min = s_nodes.front();
  impl->s_max = s_nodes.back();
  impl->rho_s = CubicSpline(s_nodes, rho);

  // Horizon charts anchor rho(r_match) = r_match, mirroring the Schwarzschild
  // closed form (which passes through rho(4M) = 4M). Regular-center charts
  // anchor rho(r = 0) = 0: the half-line machinery puts the center at rho = 0.
  double shift;
  if (impl->horizon_kind) {
    double s_anchor = std::log((impl->r_match - bg.rmin) / impl->s0);
    shift = impl->r_match - impl->rho_s.eval(s_anchor);
  } else {
    shift = -impl->rho_s.eval(0.0);
  }
  for (auto& v : rho) v += shift;
  impl->rho_s = CubicSpline(s_nodes, rho);
  impl->rho_top = rho.back();
  impl->r_top = impl->horizon_kind ? bg.rmin + impl->s0 * std::exp(impl->s_max)
                                   : impl->s0 * std::sinh(impl->s_max / impl->s0);
  impl->w_top = chart.weight(impl->r_top);
  return chart;
}

// ---------------------------------------------------------------------------
// Per-mode potential.

class ModePotential {
 public:
  int ell() const { return p_->ell; }
  double Lambda2() const { return p_->Lambda2; }
  bool case_a() const { return p_->case_a; }
  double mass() const { return p_->mass; }
  const std::string& name() const { return p_->name; }
  bool has_chart() const { return p_->has_chart; }
  const NormalizedChart& chart() const { return p_->chart; }

  // Full potential V(rho) (fast path through the table when present).
  double V(double rho) const {
    const Impl& im = *p_;
    if (im.direct) {
      if (im.Lambda2 == 0.0) return im.direct_V(rho);
      if (rho <= 0.0) fail(errc::bad_config, "V: rho must be positive");
      return im.direct_V(rho) + im.Lambda2 / (rho * rho);
    }
    if (im.flat) {
      if (im.Lambda2 == 0.0) return 0.0;
      if (im.case_a && rho <= 0.0) fail(errc::bad_config, "V: rho must be positive");
      return im.Lambda2 / (rho * rho);
    }
    if (!im.tbl.built || rho < im.tbl.rho_lo || rho > im.tbl.rho_hi) return V_exact(rho);
    double A = im.tbl.A.eval(rho);
    if (im.Lambda2 == 0.0) return A;
    if (im.tbl.regular && rho == 0.0) fail(errc::bad_config, "V: rho must be positive");
    double Bt = im.tbl.Bt.eval(rho);
    double B = im.tbl.regular ? Bt / (rho * rho) : Bt;
    return A + im.Lambda2 * B;
  }

  // Direct evaluation, bypassing the table (used to validate it).
  double V_exact(double rho) const {
    const Impl& im = *p_;
    if (im.direct) {
      if (im.Lambda2 == 0.0) return im.direct_V(rho);
      if (rho <= 0.0) fail(errc::bad_config, "V: rho must be positive");
      return im.direct_V(rho) + im.Lambda2 / (rho * rho);
    }
    if (im.flat) return im.Lambda2 == 0.0 ? 0.0 : im.Lambda2 / (rho * rho);
    if (im.schw) {
      double M = im.chart.mass();
      double xi = im.chart.excess_of_rho(rho);
      double r = 2.0 * M + xi;
      double f = xi / r;  // 1 - 2M/r without cancellation
      return f * (im.Lambda2 / (r * r) + 2.0 * M / (r * r * r));
    }
    return generic_A(rho) + im.Lambda2 * generic_B(rho);
  }

  double r_of_rho(double rho) const {
    const Impl& im = *p_;
    if (im.direct || im.flat) return rho;
    if (im.tbl.built && rho >= im.tbl.rho_lo && rho <= im.tbl.rho_hi) return im.tbl.r.eval(rho);
    return im.chart.r_of_rho(rho);
  }

  double J(double rho) const {  // dr/drho
    const Impl& im = *p_;
    if (im.direct || im.flat) return 1.0;
    if (im.tbl.built && rho >= im.tbl.rho_lo && rho <= im.tbl.rho_hi) return im.tbl.J.eval(rho);
    return 1.0 / im.chart.weight(im.chart.r_of_rho(rho));
  }

  double qtilde(double rho) const {
    const Impl& im = *p_;
    if (im.direct || im.flat) return rho;
    double r = r_of_rho(rho);
    return r / std::sqrt(1.0 + im.chart.background().ww(r));
  }

  // Regular part of the potential at the center (case A): V - l(l+1)/rho^2.
  double Vreg0() const {
    const Impl& im = *p_;
    if (!im.case_a) fail(errc::bad_config, "Vreg0: whole-line potential");
    if (im.direct) return im.direct_V(im.center_probe);
    if (im.flat) return 0.0;
    return reg_limit();
  }

  // Build (or rebuild) the evaluation table; idempotent. Called lazily by the
  // frequency-domain solvers.
  void ensure_table() const {
    Impl& im = *p_;
    if (im.direct || im.flat || im.tbl.built) return;
    build_table(im);
  }

  double table_rel_error_probe() const {  // diagnostic: spline vs exact
    ensure_table();
    const Impl& im = *p_;
    if (im.direct || im.flat) return 0.0;
    double worst = 0.0;
    for (double rho = std::max(im.tbl.rho_lo + 1.0, 1.0); rho < im.tbl.rho_hi;
         rho *= 1.7) {
      double a = V(rho), b = V_exact(rho);
      worst = std::max(worst, std::abs(a - b) / (std::abs(b) + 1e-300));
    }
    return worst;
  }

  static ModePotential from_chart(const NormalizedChart& chart, int ell) {
    if (ell < 0) fail(errc::bad_config, "mode_potential: ell must be >= 0");
    auto impl = std::make_shared<Impl>();
    impl->ell = ell;
    impl->Lambda2 = double(ell) * (ell + 1);
    impl->chart = chart;
    impl->has_chart = true;
    impl->case_a = chart.regular_center();
    impl->mass = chart.mass();
    impl->name = chart.background().name;
    impl->flat = chart.background().name == "minkowski";
    impl->schw = chart.background().name == "schwarzschild";
    ModePotential mp;
    mp.p_ = impl;
    return mp;
  }

  // Synthetic potential on the flat chart (r = rho). case_a selects the
  // half-line (Dirichlet at 0) versus whole-line domain. The callable supplies
  // the potential on top of the centrifugal barrier: for ell >= 1 the term
  // l(l+1)/rho^2 is added automatically, so the callable must stay regular at
  // the center.
  static ModePotential direct(std::string name, std::function<double(double)> V, bool case_a,
                              int ell = 0) {
    if (ell > 0 && !case_a)
      fail(errc::bad_config, "direct whole-line potentials must use ell = 0");
    auto impl = std::make_shared<Impl>();
    impl->ell = ell;
    impl->Lambda2 = double(ell) * (ell + 1);
    impl->direct = true;
    impl->direct_V = std::move(V);
    impl->case_a = case_a;
    impl->mass = 0.0;
    impl->name = std::move(name);
    ModePotential mp;
    mp.p_ = impl;
    return mp;
  }

 private:
  struct Table {
    bool built = false;
    bool regular = false;
    double rho_lo = 0.0, rho_hi = 0.0;
    CubicSpline A, Bt, r, J;  // Bt stores B (horizon) or B*rho^2 (regular)
  };
  struct Impl {
    int ell = 0;
    double Lambda2 = 0.0;
    bool case_a = false;
    bool flat = false;
    bool schw = false;
    bool direct = false;
    bool has_chart = false;
    double mass = 0.0;
    double center_probe = 0.0;
    std::string name;
    NormalizedChart chart;
    std::function<double(double)> direct_V;
    mutable Table tbl;
  };

  double reg_limit() const {
    double d = 1e-3;
    auto reg = [&](double rho) { return V_exact(rho) - p_->Lambda2 / (rho * rho); };
    // Richardson over an even function of rho.
    return (4.0 * reg(d) - reg(2.0 * d)) / 3.0;
  }

  // Generic potential pieces through the chart (chain rule in r).
  double generic_A(double rho) const {
    const auto& bg = p_->chart.background();
    double r = p_->chart.r_of_rho(rho);
    if (p_->case_a && r < 1e-8) {
      // qtilde''/qtilde is even and finite at the center; extrapolate from two
      // fixed off-center probes (both have r >> 1e-8, so this cannot re-enter).
      double d = 1e-4;
      return (4.0 * generic_A(d) - generic_A(2.0 * d)) / 3.0;
    }
    double ww = bg.ww(r), dww = bg.d_ww(r);
    double hh = 1e-5 * (1.0 + std::abs(r));
    double ddww = (bg.d_ww(r + hh) - bg.d_ww(r - hh)) / (2.0 * hh);
    double W1 = 1.0 + ww;
    double P = 1.0 / std::sqrt(W1);
    double Pp = -0.5 * dww / (W1 * std::sqrt(W1));
    double Ppp = 0.75 * dww * dww / (W1 * W1 * std::sqrt(W1)) - 0.5 * ddww / (W1 * std::sqrt(W1));
    double q = r * P;
    double q_r = P + r * Pp;
    double q_rr = 2.0 * Pp + r * Ppp;
    // w'(r) from the analytic derivatives of the deviations.
    double rr = bg.rr(r), drr = bg.d_rr(r);
    double dtt = bg.d_tt(r);
    double rt = bg.rt(r), drt = bg.d_rt(r);
    double denom = 1.0 + rr;
    double Fv = 1.0 - bg.tt(r) + rt * rt / denom;
    double Fp = -dtt + (2.0 * rt * drt * denom - rt * rt * drr) / (denom * denom);
    double w = std::sqrt(Fv / denom);
    double wp = 0.5 * w * (Fp / Fv - drr / denom);
    double drdrho = 1.0 / w;
    double d2rdrho2 = -wp / (w * w * w);
    double qpp = q_rr * drdrho * drdrho + q_r * d2rdrho2;
    return qpp / q;
  }
  double generic_B(double rho) const {
    const auto& bg = p_->chart.background();
    double r = p_->chart.r_of_rho(rho);
    double Fv = p_->chart.F(r);
    return (1.0 + bg.ww(r)) / (Fv * r * r);
  }

  static void build_table(Impl& im) {
    Table t;
    t.regular = im.case_a;
    double Ms = std::max(1.0, im.mass);
    double lo = t.regular ? 0.0 : -60.0 * Ms;
    double mid = 200.0 * Ms;
    double hi = 2.5e5;
    std::vector<double> nodes;
    double h = 0.02 * Ms;
    int n_core = static_cast<int>(std::ceil((mid - lo) / h));
    for (int i = 0; i <= n_core; ++i) nodes.push_back(lo + (mid - lo) * double(i) / n_core);
    double grow = std::pow(2.0, 1.0 / 128.0);
    for (double x = mid * grow; x < hi; x *= grow) nodes.push_back(x);
    nodes.push_back(hi);

    std::vector<double> Av(nodes.size()), Bv(nodes.size()), rv(nodes.size()), Jv(nodes.size());
    ModePotential probe;  // evaluator with ell = 0 to reuse the exact pieces
    auto impl0 = std::make_shared<Impl>(im);
    impl0->Lambda2 = 0.0;
    impl0->ell = 0;
    probe.p_ = impl0;
    ModePotential unit;  // ell with Lambda2 = 1 isolates B
    auto impl1 = std::make_shared<Impl>(im);
    impl1->Lambda2 = 1.0;
    impl1->ell = 1;  // label only
    unit.p_ = impl1;

    for (std::size_t i = 0; i < nodes.size(); ++i) {
      double rho = nodes[i];
      double r = im.chart.r_of_rho(rho);
      double w = im.chart.weight(r);
      if (!(w > 0.0)) fail(errc::non_monotone_tortoise, "non-positive weight in table build");
      rv[i] = r;
      Jv[i] = 1.0 / w;
      double A, B;
      if (t.regular && rho == 0.0) {
        A = 0.0;  // patched after the loop by one-sided extrapolation
        B = 0.0;
      } else {
        A = probe.V_exact(rho);
        B = unit.V_exact(rho) - A;
      }
      Av[i] = A;
      Bv[i] = t.regular ? B * rho * rho : B;
    }
    if (t.regular) {
      Av[0] = 2.0 * Av[1] - Av[2];
      Bv[0] = 2.0 * Bv[1] - Bv[2];
      rv[0] = 0.0;
    }
    t.A = CubicSpline(nodes, Av);
    t.Bt = CubicSpline(nodes, Bv);
    t.r = CubicSpline(nodes, rv);
    t.J = CubicSpline(nodes, Jv);
    t.rho_lo = nodes.front();
    t.rho_hi = nodes.back();
    t.built = true;
    im.tbl = std::move(t);
  }

  std::shared_ptr<Impl> p_;
};

inline ModePotential mode_potential(const NormalizedChart& chart, int ell) {
  return ModePotential::from_chart(chart, ell);
}

}  // namespace wavetail
