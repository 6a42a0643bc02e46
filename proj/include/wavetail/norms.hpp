#pragma once
// Shell-localized norms on mode fields.
//
// Fields are carried in the phi-form (phi = qtilde * u); the r^2 dr measure of
// the 3D norm then turns into J drho on phi:
//   integral |u|^2 r^2 dr = integral |phi|^2 J drho.
// All shell norms use the dyadic partition by <r>:
//   le:       sup_k ( 2^{-k} int_{A_k} ... )^{1/2}
//   le dual:  sum_k ( 2^{+k} int_{A_k} ... )^{1/2}
//
// Angular and scaling generators act on a fixed harmonic through their radial
// shadows: T -> d/drho on spatial slices (i tau in frequency), Omega -> Lambda,
// S -> r d/dr = (r/J) d/drho.

#include <cmath>
#include <string>
#include <vector>

#include "wavetail/canonical.hpp"
#include "wavetail/common.hpp"
#include "wavetail/dyadic.hpp"
#include "wavetail/grid.hpp"

namespace wavetail {

template <class T>
std::vector<T> field_derivative(const Field<T>& f) {
  std::vector<T> d(f.g.n);
  for (int i = 0; i < f.g.n; ++i) d[i] = d1_at(f.v, i, f.g.h);
  return d;
}

namespace detail {
template <class F>
double sup_shell_norm(const DyadicPartition& part, F&& integrand) {
  double sup = 0.0;
  for (int k = part.k_min; k <= part.k_max; ++k) {
    double s = part.shell_integral(k, integrand) * std::pow(2.0, -double(k));
    sup = std::max(sup, s);
  }
  return std::sqrt(std::max(0.0, sup));
}
template <class F>
double sum_shell_norm(const DyadicPartition& part, F&& integrand) {
  double total = 0.0;
  for (int k = part.k_min; k <= part.k_max; ++k) {
    double s = part.shell_integral(k, integrand) * std::pow(2.0, double(k));
    total += std::sqrt(std::max(0.0, s));
  }
  return total;
}
inline double sqabs(double x) { return x * x; }
inline double sqabs(const cd& x) { return std::norm(x); }
}  // namespace detail

// ||phi||_LE
template <class T>
double le_norm(const Field<T>& phi, const DyadicPartition& part) {
  return detail::sup_shell_norm(part, [&](int i) { return detail::sqabs(phi.v[i]); });
}

// ||g||_LE*  (dual pairing partner of le_norm)
template <class T>
double le_dual_norm(const Field<T>& g, const DyadicPartition& part) {
  return detail::sum_shell_norm(part, [&](int i) { return detail::sqabs(g.v[i]); });
}

// u-form and its radial derivative, with a cubic extrapolation onto a center
// node where qtilde vanishes.
template <class T>
void uform(const Field<T>& phi, const ModePotential& pot, std::vector<T>& u,
           std::vector<T>& du) {
  int n = phi.g.n;
  u.resize(n);
  for (int i = 0; i < n; ++i) {
    double q = pot.qtilde(phi.g.x(i));
    if (std::abs(q) < 1e-14) {
      u[i] = T{};  // patched below
    } else {
      u[i] = phi.v[i] / q;
    }
  }
  for (int i = 0; i < n; ++i) {
    if (std::abs(pot.qtilde(phi.g.x(i))) < 1e-14 && n >= 4)
      u[i] = 3.0 * u[i + 1] - 3.0 * u[i + 2] + u[i + 3];
  }
  du.resize(n);
  for (int i = 0; i < n; ++i) du[i] = d1_at(u, i, phi.g.h);
}

// Spatial LE^m norms (m = 0, 1, 2) with the per-harmonic derivative
// realizations |grad u|^2 = |du|^2 + L2 |u/r|^2 and
// |grad^2 u|^2 = |d2u|^2 + 2|du/r|^2 + L2 |(u/r)'|^2 + L2^2 |u/r^2|^2.
template <class T>
double le_spatial_norm(const Field<T>& phi, const ModePotential& pot,
                       const DyadicPartition& part, int m) {
  if (m == 0) return le_norm(phi, part);
  if (m != 1 && m != 2) fail(errc::bad_config, "le_spatial_norm: m must be 0, 1, 2");
  int n = phi.g.n;
  std::vector<T> u, du;
  uform(phi, pot, u, du);
  double L2 = pot.Lambda2();
  std::vector<double> w(n);
  if (m == 1) {
    for (int i = 0; i < n; ++i) {
      double r = pot.r_of_rho(phi.g.x(i));
      double q = pot.qtilde(phi.g.x(i));
      double rr = std::max(std::abs(r), 1e-14);
      w[i] = q * q * (detail::sqabs(du[i]) + L2 * detail::sqabs(u[i]) / (rr * rr));
    }
  } else {
    std::vector<T> d2u(n), uor(n);
    for (int i = 0; i < n; ++i) d2u[i] = d1_at(du, i, phi.g.h);
    for (int i = 0; i < n; ++i) {
      double r = std::abs(pot.r_of_rho(phi.g.x(i)));
      uor[i] = r < 1e-14 ? T{} : u[i] / r;
    }
    // same center patch as uform: a raw 1/r floor at the r = 0 node would
    // leak a huge value into the neighbors through the derivative stencil
    for (int i = 0; i < n; ++i)
      if (std::abs(pot.r_of_rho(phi.g.x(i))) < 1e-14 && n >= 4)
        uor[i] = 3.0 * uor[i + 1] - 3.0 * uor[i + 2] + uor[i + 3];
    std::vector<T> duor(n);
    for (int i = 0; i < n; ++i) duor[i] = d1_at(uor, i, phi.g.h);
    for (int i = 0; i < n; ++i) {
      double r = std::max(std::abs(pot.r_of_rho(phi.g.x(i))), 1e-14);
      double q = pot.qtilde(phi.g.x(i));
      w[i] = q * q *
             (detail::sqabs(d2u[i]) + 2.0 * detail::sqabs(du[i]) / (r * r) +
              L2 * detail::sqabs(duor[i]) + L2 * L2 * detail::sqabs(u[i]) / (r * r * r * r));
    }
  }
  return detail::sup_shell_norm(part, [&](int i) { return w[i]; });
}

struct LeTauResult {
  double value = 0.0;
  bool under_resolved = false;
};

// ||v||_{LE_tau}: three-term integrand |v'|^2 + |tau v|^2 + |v/<r>|^2.
inline LeTauResult le_tau_norm(const ComplexField& v, cd tau, const DyadicPartition& part) {
  LeTauResult out;
  out.under_resolved = v.g.h * std::abs(tau) > 0.1;
  std::vector<cd> dv = field_derivative(v);
  double t2 = std::norm(tau);
  out.value = detail::sup_shell_norm(part, [&](int i) {
    double rw = part.rweight[i];
    return std::norm(dv[i]) + t2 * std::norm(v.v[i]) + std::norm(v.v[i]) / (rw * rw);
  });
  return out;
}

// Dual pairing partner used by the frequency-domain monitors.
inline double le_tau_dual_norm(const ComplexField& g, const DyadicPartition& part) {
  return le_dual_norm(g, part);
}

// ||chi v||_{L^2} with the standard cutoff equal to 1 on r in
// [2.5, 3.5] * max(M, 1) and supported on the 1.5x dilate.
template <class T>
double weak_le_norm(const Field<T>& v, const ModePotential& pot,
                    const DyadicPartition& part, double r_center = 0.0,
                    double r_halfwidth = 0.0) {
  double Ms = std::max(1.0, pot.mass());
  double c = r_center > 0 ? r_center : 3.0 * Ms;
  double hw = r_halfwidth > 0 ? r_halfwidth : 0.5 * Ms;
  double acc = 0.0;
  for (int k = part.k_min; k <= part.k_max; ++k)
    acc += part.shell_integral(k, [&](int i) {
      double r = pot.r_of_rho(v.g.x(i));
      return bump_chi(r, c, hw) * detail::sqabs(v.v[i]);
    });
  return std::sqrt(std::max(0.0, acc));
}

// ---------------------------------------------------------------------------
// Vector-field algebra shadows on a fixed harmonic.

template <class T>
std::vector<T> vf_T(const std::vector<T>& u, double h) {  // spatial slice: d/drho
  std::vector<T> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = d1_at(u, i, h);
  return out;
}

template <class T>
std::vector<T> vf_Omega(const std::vector<T>& u, double Lambda2) {
  std::vector<T> out(u);
  double L = std::sqrt(Lambda2);
  for (auto& x : out) x *= L;
  return out;
}

template <class T>
std::vector<T> vf_S(const std::vector<T>& u, const RadialGrid& g, const ModePotential& pot) {
  std::vector<T> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double rho = g.x(i);
    out[i] = (pot.r_of_rho(rho) / pot.J(rho)) * d1_at(u, i, g.h);
  }
  return out;
}

// sup over words Z^alpha, |alpha| <= m, Z in {T, Omega, S}, of the LE norm of
// qtilde * (Z^alpha u) (phi-form again).
template <class T>
double z_norm(const Field<T>& phi, const ModePotential& pot, const DyadicPartition& part,
              int m) {
  if (m < 0 || m > 3) fail(errc::bad_config, "z_norm: m must be in [0,3]");
  std::vector<T> u, du;
  uform(phi, pot, u, du);
  double sup = 0.0;
  auto measure = [&](const std::vector<T>& w) {
    Field<T> f(phi.g);
    for (int i = 0; i < phi.g.n; ++i) f.v[i] = w[i] * pot.qtilde(phi.g.x(i));
    sup = std::max(sup, le_norm(f, part));
  };
  std::vector<std::vector<T>> frontier{u};
  measure(u);
  for (int depth = 1; depth <= m; ++depth) {
    std::vector<std::vector<T>> next;
    for (const auto& w : frontier) {
      next.push_back(vf_T(w, phi.g.h));
      next.push_back(vf_Omega(w, pot.Lambda2()));
      next.push_back(vf_S(w, phi.g, pot));
      for (auto& nw : {next[next.size() - 3], next[next.size() - 2], next[next.size() - 1]})
        measure(nw);
    }
    frontier = std::move(next);
  }
  return sup;
}

}  // namespace wavetail
