#pragma once
// Method-of-lines evolution of  phi_tt = phi_xx - V phi  on a uniform tortoise
// lattice: classical RK4 in time, 4th-order centered space.  The spatial
// operator is built as D1(D1 phi) from a diagonal-norm summation-by-parts
// first derivative, and the characteristic outflow conditions
// (d/dt -+ d/drho) phi = 0 enter as penalty (SAT) terms on pi at the two
// ends.  With w = D1 phi the discrete energy
//   E = 1/2 sum_i H_i (pi_i^2 + w_i^2 + V_i phi_i^2)
// obeys dE/dt = -pi_0^2 - pi_{n-1}^2 <= 0 exactly in semidiscrete form, so
// outflow runs dissipate monotonically to roundoff and reflecting/pinned runs
// conserve.  A regular-center chart (case A) pins phi(0) = pi(0) = 0.
//
// dt = cfl * min(h, RK4 spectral limit); the first bound is the advertised
// CFL contract, the second covers stiff potentials (l >= 2 regular centers).

#include <cmath>
#include <string>
#include <vector>

#include "wavetail/canonical.hpp"
#include "wavetail/common.hpp"
#include "wavetail/grid.hpp"
#include "wavetail/spline.hpp"

namespace wavetail {

struct DataSpec {
  enum Kind { gaussian_time_symmetric, gaussian_outgoing, gaussian_velocity } kind =
      gaussian_time_symmetric;
  double center = 20.0;
  double width = 2.0;
  double amplitude = 1.0;
  double truncate = 8.0;  // hard cutoff at |x-center| >= truncate*width
};

struct Snapshot {
  double t = 0.0;
  RadialGrid g;
  std::vector<double> phi, pi;
};

enum class BoundaryKind { outflow, reflecting };

struct EvolutionConfig {
  double rho_min = -60.0;
  double rho_max = 200.0;
  double h = 0.05;
  double cfl = 0.8;
  double t_final = 100.0;
  std::vector<double> observers;
  std::vector<double> rays;  // ray offsets c: points (t, rho = t - c)
  int snapshot_stride = 0;   // every k-th step (0 = none)
  int snapshot_space_stride = 8;
  int energy_stride = 1;
  bool assert_energy_monotone = false;
  bool enforce_clean_window = true;
  BoundaryKind boundary = BoundaryKind::outflow;  // reflecting is diagnostic only
  DataSpec data;
};

struct EvolveResult {
  RadialGrid g;
  double dt = 0.0;
  int steps = 0;
  std::vector<TimeSeries> obs_phi, obs_dphi;
  std::vector<double> ray_offsets;
  std::vector<Curve> ray_u;  // u = phi/qtilde along each ray
  TimeSeries energy;         // quadratic-form energy
  TimeSeries energy_phys;    // (pi^2 + (D1 phi)^2 + V phi^2)/2 integral
  std::vector<Snapshot> snapshots;
};

namespace detail {

// Diagonal-norm 4th-order SBP first derivative (four 2nd-order boundary
// rows, standard central-4 interior).  H D + D^T H = diag(-1, 0, ..., 0, 1),
// which is what makes the SAT energy bookkeeping below exact.
inline constexpr double sbp_hw[4] = {17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0};

inline void sbp_d1(const std::vector<double>& f, double h, std::vector<double>& w) {
  const int n = static_cast<int>(f.size());
  const double ih = 1.0 / h;
  w[0] = ih * (-24.0 / 17.0 * f[0] + 59.0 / 34.0 * f[1] - 4.0 / 17.0 * f[2] -
               3.0 / 34.0 * f[3]);
  w[1] = ih * 0.5 * (f[2] - f[0]);
  w[2] = ih * (4.0 / 43.0 * f[0] - 59.0 / 86.0 * f[1] + 59.0 / 86.0 * f[3] -
               4.0 / 43.0 * f[4]);
  w[3] = ih * (3.0 / 98.0 * f[0] - 59.0 / 98.0 * f[2] + 32.0 / 49.0 * f[4] -
               4.0 / 49.0 * f[5]);
  const double c1 = 8.0 / (12.0 * h), c2 = 1.0 / (12.0 * h);
  for (int i = 4; i < n - 4; ++i)
    w[i] = c1 * (f[i + 1] - f[i - 1]) - c2 * (f[i + 2] - f[i - 2]);
  w[n - 4] = -ih * (3.0 / 98.0 * f[n - 1] - 59.0 / 98.0 * f[n - 3] +
                    32.0 / 49.0 * f[n - 5] - 4.0 / 49.0 * f[n - 6]);
  w[n - 3] = -ih * (4.0 / 43.0 * f[n - 1] - 59.0 / 86.0 * f[n - 2] +
                    59.0 / 86.0 * f[n - 4] - 4.0 / 43.0 * f[n - 5]);
  w[n - 2] = ih * 0.5 * (f[n - 1] - f[n - 3]);
  w[n - 1] = -ih * (-24.0 / 17.0 * f[n - 1] + 59.0 / 34.0 * f[n - 2] -
                    4.0 / 17.0 * f[n - 3] - 3.0 / 34.0 * f[n - 4]);
}

struct StencilContext {
  int n = 0;
  double h = 0.0;
  bool case_a = false;
  bool reflecting = false;
  const std::vector<double>* V = nullptr;
  mutable std::vector<double> w;  // scratch for D1 phi
};

// Spatial RHS: dphi = pi, dpi = D1(D1 phi) - V phi + SAT penalties.
inline void rhs(const StencilContext& c, const std::vector<double>& phi,
                const std::vector<double>& pi, std::vector<double>& dphi,
                std::vector<double>& dpi) {
  const int n = c.n;
  const std::vector<double>& V = *c.V;

  sbp_d1(phi, c.h, c.w);
  sbp_d1(c.w, c.h, dpi);
  for (int i = 0; i < n; ++i) {
    dphi[i] = pi[i];
    dpi[i] -= V[i] * phi[i];
  }

  if (c.case_a || c.reflecting) {
    dphi[0] = 0.0;  // pinned end: phi(0) = pi(0) = 0 stays exact under RK4
    dpi[0] = 0.0;
  } else {
    dpi[0] -= (pi[0] - c.w[0]) / (sbp_hw[0] * c.h);
  }
  if (c.reflecting) {
    dphi[n - 1] = 0.0;
    dpi[n - 1] = 0.0;
  } else {
    dpi[n - 1] -= (pi[n - 1] + c.w[n - 1]) / (sbp_hw[0] * c.h);
  }
}

}  // namespace detail

inline void fill_data(const DataSpec& d, const RadialGrid& g, bool case_a, double parity,
                      std::vector<double>& phi, std::vector<double>& pi) {
  phi.assign(g.n, 0.0);
  pi.assign(g.n, 0.0);
  for (int i = 0; i < g.n; ++i) {
    double x = g.x(i);
    double s = (x - d.center) / d.width;
    if (std::abs(s) >= d.truncate) continue;
    double gval = d.amplitude * std::exp(-s * s);
    double gprime = gval * (-2.0 * s / d.width);
    switch (d.kind) {
      case DataSpec::gaussian_time_symmetric: phi[i] = gval; break;
      case DataSpec::gaussian_outgoing: phi[i] = gval; pi[i] = -gprime; break;
      case DataSpec::gaussian_velocity: pi[i] = gval; break;
    }
  }
  if (case_a) {
    phi[0] = 0.0;
    pi[0] = 0.0;
    (void)parity;
  }
}

inline EvolveResult evolve(const ModePotential& pot, const EvolutionConfig& cfg) {
  if (!(cfg.cfl > 0.0) || cfg.cfl > 0.9)
    fail(errc::cfl_violation, "cfl must lie in (0, 0.9]");
  bool case_a = pot.case_a();
  double x0 = case_a ? 0.0 : cfg.rho_min;
  if (case_a && cfg.rho_min != 0.0 && cfg.rho_min > 0.0)
    fail(errc::bad_config, "regular-center chart grids start at rho = 0");
  RadialGrid g = RadialGrid::over(x0, cfg.rho_max, cfg.h);
  if (g.n < 12) fail(errc::bad_config, "grid too short for the boundary blocks");

  if (cfg.enforce_clean_window)
    for (double ob : cfg.observers)
      if (!(ob + cfg.t_final < g.xmax()))
        fail(errc::clean_window_violation,
             "observer at " + std::to_string(ob) + " needs rho_max > " +
                 std::to_string(ob + cfg.t_final));

  std::vector<double> V(g.n);
  for (int i = 0; i < g.n; ++i) {
    double x = g.x(i);
    V[i] = (case_a && i == 0) ? 0.0 : pot.V(x);
  }
  double vmax = 0.0;
  for (int i = 1; i < g.n; ++i) vmax = std::max(vmax, std::abs(V[i]));
  // wide-D2 spectral radius is (1.373/h)^2; 2.2 leaves margin for the SATs
  double spec = 2.2 / (g.h * g.h) + vmax;
  double dt_limit = 2.0 * std::sqrt(2.0) / std::sqrt(spec);
  double dt = cfg.cfl * std::min(g.h, dt_limit);
  int steps = static_cast<int>(std::ceil(cfg.t_final / dt));
  dt = cfg.t_final / steps;
  if (dt > dt_limit) fail(errc::cfl_violation, "time step exceeds stability limit");

  detail::StencilContext ctx{g.n, g.h, case_a,
                             cfg.boundary == BoundaryKind::reflecting, &V,
                             std::vector<double>(g.n)};

  std::vector<double> phi, pi;
  fill_data(cfg.data, g, case_a, 0.0, phi, pi);

  EvolveResult res;
  res.g = g;
  res.dt = dt;
  res.steps = steps;
  res.ray_offsets = cfg.rays;
  res.obs_phi.resize(cfg.observers.size());
  res.obs_dphi.resize(cfg.observers.size());
  for (std::size_t j = 0; j < cfg.observers.size(); ++j) {
    res.obs_phi[j] = {0.0, dt, {}};
    res.obs_dphi[j] = {0.0, dt, {}};
    res.obs_phi[j].v.reserve(steps + 1);
    res.obs_dphi[j].v.reserve(steps + 1);
  }
  res.ray_u.resize(cfg.rays.size());
  res.energy = {0.0, dt * std::max(1, cfg.energy_stride), {}};
  res.energy_phys = res.energy;

  // energy forms; the first is the exact Lyapunov function of the scheme
  std::vector<double> ebuf1(g.n);
  auto sbp_weight = [&](int i) {
    int d = std::min(i, g.n - 1 - i);
    return d < 4 ? detail::sbp_hw[d] : 1.0;
  };
  auto quad_energy = [&]() {
    detail::sbp_d1(phi, g.h, ebuf1);
    double e = 0.0;
    for (int i = 0; i < g.n; ++i)
      e += sbp_weight(i) *
           (pi[i] * pi[i] + ebuf1[i] * ebuf1[i] + V[i] * phi[i] * phi[i]);
    return 0.5 * g.h * e;
  };
  auto phys_energy = [&]() {
    double e = 0.0;
    for (int i = 2; i < g.n - 2; ++i) {
      double dphi = d1_c4(&phi[i], g.h);
      e += pi[i] * pi[i] + dphi * dphi + V[i] * phi[i] * phi[i];
    }
    return 0.5 * g.h * e;
  };

  auto record = [&](int step) {
    double t = step * dt;
    for (std::size_t j = 0; j < cfg.observers.size(); ++j) {
      res.obs_phi[j].v.push_back(interp_cubic(g.x0, g.h, phi, cfg.observers[j]));
      res.obs_dphi[j].v.push_back(interp_cubic(g.x0, g.h, pi, cfg.observers[j]));
    }
    for (std::size_t j = 0; j < cfg.rays.size(); ++j) {
      double x = t - cfg.rays[j];
      if (x < g.x0 + 2 * g.h || x > g.xmax() - 2 * g.h) continue;
      double ph = interp_cubic(g.x0, g.h, phi, x);
      res.ray_u[j].t.push_back(t);
      res.ray_u[j].v.push_back(ph / pot.qtilde(x));
    }
    if (cfg.snapshot_stride > 0 && step % cfg.snapshot_stride == 0) {
      Snapshot s;
      s.t = t;
      int ss = std::max(1, cfg.snapshot_space_stride);
      s.g = {g.x0, g.h * ss, (g.n + ss - 1) / ss};
      for (int i = 0; i < g.n; i += ss) {
        s.phi.push_back(phi[i]);
        s.pi.push_back(pi[i]);
      }
      res.snapshots.push_back(std::move(s));
    }
  };

  std::vector<double> k1p(g.n), k1q(g.n), k2p(g.n), k2q(g.n), k3p(g.n), k3q(g.n), k4p(g.n),
      k4q(g.n), tp(g.n), tq(g.n);

  record(0);
  double e_prev = 0.0, e0 = 1.0;
  if (cfg.energy_stride > 0) {
    e_prev = quad_energy();
    e0 = std::abs(e_prev) + 1e-300;
    res.energy.v.push_back(e_prev);
    res.energy_phys.v.push_back(phys_energy());
  }

  for (int s = 1; s <= steps; ++s) {
    detail::rhs(ctx, phi, pi, k1p, k1q);
    for (int i = 0; i < g.n; ++i) { tp[i] = phi[i] + 0.5 * dt * k1p[i]; tq[i] = pi[i] + 0.5 * dt * k1q[i]; }
    detail::rhs(ctx, tp, tq, k2p, k2q);
    for (int i = 0; i < g.n; ++i) { tp[i] = phi[i] + 0.5 * dt * k2p[i]; tq[i] = pi[i] + 0.5 * dt * k2q[i]; }
    detail::rhs(ctx, tp, tq, k3p, k3q);
    for (int i = 0; i < g.n; ++i) { tp[i] = phi[i] + dt * k3p[i]; tq[i] = pi[i] + dt * k3q[i]; }
    detail::rhs(ctx, tp, tq, k4p, k4q);
    const double w = dt / 6.0;
    for (int i = 0; i < g.n; ++i) {
      phi[i] += w * (k1p[i] + 2.0 * k2p[i] + 2.0 * k3p[i] + k4p[i]);
      pi[i] += w * (k1q[i] + 2.0 * k2q[i] + 2.0 * k3q[i] + k4q[i]);
    }
    if (s % 50 == 0 || s == steps) {
      double probe = phi[g.n / 2] + pi[g.n / 3];
      if (!std::isfinite(probe)) fail(errc::nan_abort, "field lost finiteness at t=" +
                                                            std::to_string(s * dt));
    }
    record(s);
    if (cfg.energy_stride > 0 && s % cfg.energy_stride == 0) {
      double e = quad_energy();
      if (cfg.assert_energy_monotone && e > e_prev + 1e-12 * e0)
        fail(errc::bad_config, "discrete energy increased at t=" + std::to_string(s * dt));
      e_prev = e;
      res.energy.v.push_back(e);
      res.energy_phys.v.push_back(phys_energy());
    }
  }
  return res;
}

}  // namespace wavetail
