#pragma once
// Dyadic shells A_k = { <r> in [2^k, 2^{k+1}) } over a radial lattice, binned
// by the area radius through the chart map (near a horizon the whole inner
// region is spatially compact and must land in the lowest shells).  Since
// <r> >= 2 the shells start at k = 1.

#include <cmath>
#include <functional>
#include <iostream>
#include <vector>

#include "wavetail/canonical.hpp"
#include "wavetail/common.hpp"
#include "wavetail/grid.hpp"

namespace wavetail {

struct DyadicPartition {
  RadialGrid g;
  std::vector<double> rweight;  // <r(x_i)>
  std::vector<double> jac;      // dr/drho at x_i
  std::vector<int> shell;       // shell index per node
  int k_min = 0, k_max = 0;

  int shells() const { return k_max - k_min + 1; }

  // Integral of a nodewise integrand over shell k with the J drho measure.
  // Cells cut by a shell boundary are split linearly between the shells.
  template <class F>
  double shell_integral(int k, F&& integrand) const {
    double acc = 0.0;
    for (int i = 0; i + 1 < g.n; ++i) {
      int ka = shell[i], kb = shell[i + 1];
      if (ka != k && kb != k) continue;
      double fa = integrand(i) * jac[i], fb = integrand(i + 1) * jac[i + 1];
      double cell = 0.5 * g.h * (fa + fb);
      if (ka == k && kb == k) {
        acc += cell;
      } else {
        // boundary cell: fraction of the cell lying in shell k
        double lo = std::pow(2.0, std::min(ka, kb) + 1);
        double f = (rweight[i + 1] != rweight[i])
                       ? (lo - rweight[i]) / (rweight[i + 1] - rweight[i])
                       : 0.5;
        f = std::clamp(f, 0.0, 1.0);
        acc += cell * (ka == k ? f : 1.0 - f);
      }
    }
    return acc;
  }
};

inline DyadicPartition dyadic_partition(const RadialGrid& g, const ModePotential& pot,
                                        bool warn_empty = true) {
  DyadicPartition p;
  p.g = g;
  p.rweight.resize(g.n);
  p.jac.resize(g.n);
  p.shell.resize(g.n);
  for (int i = 0; i < g.n; ++i) {
    double rho = g.x(i);
    p.rweight[i] = smooth_abs(pot.r_of_rho(rho));
    p.jac[i] = pot.J(rho);
    p.shell[i] = static_cast<int>(std::floor(std::log2(p.rweight[i])));
  }
  p.k_min = *std::min_element(p.shell.begin(), p.shell.end());
  p.k_max = *std::max_element(p.shell.begin(), p.shell.end());
  if (warn_empty) {
    static bool warned = false;
    std::vector<char> seen(p.k_max - p.k_min + 1, 0);
    for (int s : p.shell) seen[s - p.k_min] = 1;
    for (int k = p.k_min; k <= p.k_max && !warned; ++k)
      if (!seen[k - p.k_min]) {
        std::cerr << "[wavetail] warning: EmptyShell k=" << k
                  << " (grid too coarse for the dyadic partition)\n";
        warned = true;  // warn once per process
      }
  }
  return p;
}

}  // namespace wavetail
