#pragma once
// Uniform radial lattices and sampled fields/series.

#include <vector>

#include "wavetail/common.hpp"

namespace wavetail {

struct RadialGrid {
  double x0 = 0.0;  // first node
  double h = 0.0;   // spacing
  int n = 0;        // node count

  double x(int i) const { return x0 + h * i; }
  double xmax() const { return x(n - 1); }

  static RadialGrid over(double a, double b, double h_target) {
    int n = static_cast<int>(std::ceil((b - a) / h_target)) + 1;
    if (n < 8) n = 8;
    return {a, (b - a) / (n - 1), n};
  }
};

inline bool same_grid(const RadialGrid& a, const RadialGrid& b) {
  return a.n == b.n && std::abs(a.x0 - b.x0) < 1e-12 * (1.0 + std::abs(a.x0)) &&
         std::abs(a.h - b.h) < 1e-12 * a.h;
}

template <class T>
struct Field {
  RadialGrid g;
  std::vector<T> v;

  Field() = default;
  explicit Field(const RadialGrid& grid, T fill = T{}) : g(grid), v(grid.n, fill) {}
  Field(const RadialGrid& grid, std::vector<T> values) : g(grid), v(std::move(values)) {
    if (static_cast<int>(v.size()) != g.n) fail(errc::bad_config, "field/grid size mismatch");
  }
  T& operator[](int i) { return v[i]; }
  const T& operator[](int i) const { return v[i]; }
  int size() const { return g.n; }
};

using RealField = Field<double>;
using ComplexField = Field<cd>;

// Uniformly sampled time series.
struct TimeSeries {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> v;

  double t(std::size_t k) const { return t0 + dt * k; }
  std::size_t size() const { return v.size(); }
};

// General sampled curve (non-uniform abscissae), e.g. values along a ray.
struct Curve {
  std::vector<double> t, v;
};

}  // namespace wavetail
