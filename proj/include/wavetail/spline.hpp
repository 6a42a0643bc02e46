#pragma once
// Cubic spline on a strictly increasing knot vector (natural ends) and a
// local cubic interpolant for uniform grids.

#include <cmath>
#include <vector>

#include "wavetail/common.hpp"

namespace wavetail {

class CubicSpline {
 public:
  CubicSpline() = default;

  CubicSpline(std::vector<double> x, std::vector<double> y)
      : x_(std::move(x)), y_(std::move(y)) {
    std::size_t n = x_.size();
    if (n < 3 || y_.size() != n) fail(errc::bad_config, "CubicSpline: need >= 3 knots");
    for (std::size_t i = 1; i < n; ++i)
      if (!(x_[i] > x_[i - 1])) fail(errc::bad_config, "CubicSpline: knots not increasing");
    // Solve tridiagonal system for second derivatives (natural BCs).
    m_.assign(n, 0.0);
    std::vector<double> diag(n, 2.0), rhs(n, 0.0), sub(n, 0.0), sup(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
      sub[i] = hl / (hl + hr);
      sup[i] = hr / (hl + hr);
      rhs[i] = 6.0 / (hl + hr) * ((y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl);
    }
    // Thomas algorithm; first and last rows are identity (m=0).
    for (std::size_t i = 2; i + 1 < n; ++i) {
      double w = sub[i] / diag[i - 1];
      diag[i] -= w * sup[i - 1];
      rhs[i] -= w * rhs[i - 1];
    }
    for (std::size_t i = n - 2; i >= 1; --i) {
      m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
      if (i == 1) break;
    }
  }

  double eval(double x) const {
    std::size_t i = locate(x);
    double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
    double a = 1.0 - t;
    return a * y_[i] + t * y_[i + 1] +
           h * h / 6.0 * ((a * a * a - a) * m_[i] + (t * t * t - t) * m_[i + 1]);
  }

  double deriv(double x) const {
    std::size_t i = locate(x);
    double h = x_[i + 1] - x_[i], t = (x - x_[i]) / h;
    double a = 1.0 - t;
    return (y_[i + 1] - y_[i]) / h +
           h / 6.0 * ((3.0 * t * t - 1.0) * m_[i + 1] - (3.0 * a * a - 1.0) * m_[i]);
  }

  double xmin() const { return x_.front(); }
  double xmax() const { return x_.back(); }
  bool empty() const { return x_.empty(); }

 private:
  std::size_t locate(double x) const {
    // Clamped binary search; evaluation outside the knots extrapolates the
    // boundary cubic (callers keep x inside by construction).
    std::size_t lo = 0, hi = x_.size() - 1;
    if (x <= x_[0]) return 0;
    if (x >= x_[hi]) return hi - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= x ? lo : hi) = mid;
    }
    return lo;
  }

  std::vector<double> x_, y_, m_;
};

// Local cubic (4-point Lagrange) interpolation on a uniform grid: O(h^4).
template <class T>
T interp_cubic(double x0, double h, const std::vector<T>& f, double x) {
  std::size_t n = f.size();
  if (n < 4) fail(errc::bad_config, "interp_cubic: need >= 4 samples");
  double s = (x - x0) / h;
  long j = static_cast<long>(std::floor(s)) - 1;  // window [j, j+3]
  if (j < 0) j = 0;
  if (j > static_cast<long>(n) - 4) j = static_cast<long>(n) - 4;
  double t = s - j;  // in [1,2] for interior x
  double w0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
  double w1 = t * (t - 2.0) * (t - 3.0) / 2.0;
  double w2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
  double w3 = t * (t - 1.0) * (t - 2.0) / 6.0;
  return w0 * f[j] + w1 * f[j + 1] + w2 * f[j + 2] + w3 * f[j + 3];
}

}  // namespace wavetail
