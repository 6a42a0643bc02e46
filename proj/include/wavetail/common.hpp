#pragma once
// Shared numerics: deterministic reductions, quadrature, finite-difference
// stencils, small fits, bump functions, hashing.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wavetail {

using cd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846264338327950288;

// ----------------------------------------------------------------- errors

enum class errc {
  non_monotone_tortoise,
  decay_violation,
  cfl_violation,
  nan_abort,
  clean_window_violation,
  resonance_suspected,
  match_radius_too_small,
  ingoing_contamination,
  zero_resonance,
  slope_too_shallow,
  under_resolved,
  sign_change,
  insufficient_decade,
  overwrite_refused,
  bad_config,
};

inline const char* errc_name(errc e) {
  switch (e) {
    case errc::non_monotone_tortoise: return "NonMonotoneTortoise";
    case errc::decay_violation:       return "DecayViolation";
    case errc::cfl_violation:         return "CFLViolation";
    case errc::nan_abort:             return "NaNAbort";
    case errc::clean_window_violation:return "CleanWindowViolation";
    case errc::resonance_suspected:   return "ResonanceSuspected";
    case errc::match_radius_too_small:return "MatchRadiusTooSmall";
    case errc::ingoing_contamination: return "IngoingContamination";
    case errc::zero_resonance:        return "ZeroResonance";
    case errc::slope_too_shallow:     return "SlopeTooShallow";
    case errc::under_resolved:        return "UnderResolved";
    case errc::sign_change:           return "SignChange";
    case errc::insufficient_decade:   return "InsufficientDecade";
    case errc::overwrite_refused:     return "OverwriteRefused";
    case errc::bad_config:            return "BadConfig";
  }
  return "Unknown";
}

class failure : public std::runtime_error {
 public:
  failure(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw failure(code, what); }

// ------------------------------------------------------------- reductions

// Pairwise summation: deterministic, error O(log n) ulps.
template <class T>
T pairwise_sum(const T* a, std::size_t n) {
  if (n <= 32) {
    T s{};
    for (std::size_t i = 0; i < n; ++i) s += a[i];
    return s;
  }
  std::size_t m = n / 2;
  return pairwise_sum(a, m) + pairwise_sum(a + m, n - m);
}

template <class T>
T pairwise_sum(const std::vector<T>& v) {
  return pairwise_sum(v.data(), v.size());
}

// --------------------------------------------------------------- helpers

// <r> = sqrt(r^2 + 4): smooth |r|, scale fixed by the normalization radius 2.
inline double smooth_abs(double r) { return std::sqrt(r * r + 4.0); }

inline std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = a + (b - a) * (n == 1 ? 0.0 : double(i) / (n - 1));
  return x;
}

inline double gaussian(double x, double center, double width) {
  double s = (x - center) / width;
  return std::exp(-s * s);
}

// Quintic smoothstep: C^2, S(0)=0, S(1)=1, S'(0)=S'(1)=S''(0)=S''(1)=0.
inline double smoothstep5(double s) {
  s = std::clamp(s, 0.0, 1.0);
  return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

// Cutoff equal to 1 on [c-hw, c+hw], supported on the 1.5x dilate.
inline double bump_chi(double x, double center, double halfwidth) {
  double d = std::abs(x - center);
  if (d <= halfwidth) return 1.0;
  if (d >= 1.5 * halfwidth) return 0.0;
  return smoothstep5((1.5 * halfwidth - d) / (0.5 * halfwidth));
}

// ------------------------------------------------------------------ fits

struct LinFit {
  double slope = 0.0;
  double intercept = 0.0;
};

inline LinFit linear_fit(std::span<const double> x, std::span<const double> y) {
  std::size_t n = x.size();
  if (n < 2 || y.size() != n) fail(errc::bad_config, "linear_fit needs >= 2 points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
  double mx = sx / n, my = sy / n, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) fail(errc::bad_config, "linear_fit: degenerate abscissae");
  return {sxy / sxx, my - (sxy / sxx) * mx};
}

// Least squares against an arbitrary small basis; returns coefficients.
// Normal equations with partial pivoting; m is small (<= 5) everywhere.
inline std::vector<double> lsq_fit(const std::vector<std::vector<double>>& basis,
                                   std::span<const double> y) {
  std::size_t m = basis.size(), n = y.size();
  std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < n; ++k) A[i][j] += basis[i][k] * basis[j][k];
    for (std::size_t k = 0; k < n; ++k) A[i][m] += basis[i][k] * y[k];
  }
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (std::abs(A[r][c]) > std::abs(A[p][c])) p = r;
    std::swap(A[c], A[p]);
    if (A[c][c] == 0) fail(errc::bad_config, "lsq_fit: singular normal equations");
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c) continue;
      double f = A[r][c] / A[c][c];
      for (std::size_t j = c; j <= m; ++j) A[r][j] -= f * A[c][j];
    }
  }
  std::vector<double> coef(m);
  for (std::size_t i = 0; i < m; ++i) coef[i] = A[i][m] / A[i][i];
  return coef;
}

// ----------------------------------------------------------- 1D optimum

// Golden-section maximum of f on [a, b]; f unimodal there.
inline double golden_section_max(const std::function<double(double)>& f, double a, double b,
                                 double xtol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > xtol) {
    if (fc > fd) {
      b = d; d = c; fd = fc;
      c = b - invphi * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + invphi * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Bisection root of f on [a, b]; requires a sign change.
inline double bisect_root(const std::function<double(double)>& f, double a, double b,
                          double xtol) {
  double fa = f(a), fb = f(b);
  if (fa == 0) return a;
  if (fb == 0) return b;
  if ((fa > 0) == (fb > 0)) fail(errc::bad_config, "bisect_root: no sign change");
  while (b - a > xtol) {
    double m = 0.5 * (a + b), fm = f(m);
    if (fm == 0) return m;
    if ((fm > 0) == (fa > 0)) { a = m; fa = fm; } else { b = m; }
  }
  return 0.5 * (a + b);
}

// -------------------------------------------------- finite differences

// Centered stencils on uniform grids. All 4th order unless noted.
template <class T>
T d1_c4(const T* f, double h) {  // at f[0], reads f[-2..2]
  return (f[-2] - 8.0 * f[-1] + 8.0 * f[1] - f[2]) / (12.0 * h);
}

template <class T>
T d2_c4(const T* f, double h) {  // at f[0], reads f[-2..2]
  return (-f[-2] + 16.0 * f[-1] - 30.0 * f[0] + 16.0 * f[1] - f[2]) / (12.0 * h * h);
}

template <class T>
T d2_c6(const T* f, double h) {  // 6th order, reads f[-3..3]
  return (2.0 * f[-3] - 27.0 * f[-2] + 270.0 * f[-1] - 490.0 * f[0] + 270.0 * f[1] -
          27.0 * f[2] + 2.0 * f[3]) /
         (180.0 * h * h);
}

// One-sided D1 at f[0] reading f[0..4] (forward).
template <class T>
T d1_f4(const T* f, double h) {
  return (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
}

// Offset-1 D1 at f[0] reading f[-1..3].
template <class T>
T d1_o4(const T* f, double h) {
  return (-3.0 * f[-1] - 10.0 * f[0] + 18.0 * f[1] - 6.0 * f[2] + f[3]) / (12.0 * h);
}

// Mirrors of the two stencils above: D1 at f[0] reading f[-4..0] / f[-3..1].
template <class T>
T d1_b4(const T* f, double h) {
  return (25.0 * f[0] - 48.0 * f[-1] + 36.0 * f[-2] - 16.0 * f[-3] + 3.0 * f[-4]) / (12.0 * h);
}

template <class T>
T d1_ob4(const T* f, double h) {
  return (3.0 * f[1] + 10.0 * f[0] - 18.0 * f[-1] + 6.0 * f[-2] - f[-3]) / (12.0 * h);
}

// Biased D2 at f[0] reading f[-1..4] (4th order; 5th moment vanishes too).
template <class T>
T d2_b4(const T* f, double h) {
  return (10.0 * f[-1] - 15.0 * f[0] - 4.0 * f[1] + 14.0 * f[2] - 6.0 * f[3] + f[4]) /
         (12.0 * h * h);
}

// Fully one-sided D2 at f[0] reading f[0..5].
template <class T>
T d2_f4(const T* f, double h) {
  return (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] -
          10.0 * f[5]) /
         (12.0 * h * h);
}

// Pointwise 4th-order first derivative of a sampled array (one-sided near ends).
template <class T>
T d1_at(const std::vector<T>& f, std::size_t i, double h) {
  std::size_t n = f.size();
  if (n < 5) fail(errc::bad_config, "d1_at: need >= 5 samples");
  if (i >= 2 && i + 2 < n) return d1_c4(&f[i], h);
  if (i == 0) return d1_f4(&f[0], h);
  if (i == 1) return d1_o4(&f[1], h);
  if (i == n - 1) return d1_b4(&f[n - 1], h);
  return d1_ob4(&f[n - 2], h);  // i == n-2
}

// ------------------------------------------------------------ quadrature

// Endpoint-corrected cumulative trapezoid (two-term Gregory / Euler-Maclaurin):
//   I_k = h * (f_0/2 + f_1 + ... + f_{k-1} + f_k/2) - h^2/12 (f'_k - f'_0)
// with f' from 4th-order stencils. Composite error O(h^4), independent of k.
template <class T>
std::vector<T> cumulative_integral(double h, const std::vector<T>& f) {
  std::size_t n = f.size();
  std::vector<T> out(n, T{});
  if (n < 5) {  // fall back to plain trapezoid for tiny inputs
    T acc{};
    for (std::size_t k = 1; k < n; ++k) {
      acc += h * 0.5 * (f[k - 1] + f[k]);
      out[k] = acc;
    }
    return out;
  }
  T d0 = d1_at(f, 0, h);
  T acc{};
  for (std::size_t k = 1; k < n; ++k) {
    acc += h * 0.5 * (f[k - 1] + f[k]);
    out[k] = acc - (h * h / 12.0) * (d1_at(f, k, h) - d0);
  }
  return out;
}

template <class T>
T integrate(double h, const std::vector<T>& f) {
  std::size_t n = f.size();
  if (n < 2) return T{};
  if (n < 5) {
    T acc{};
    for (std::size_t k = 1; k < n; ++k) acc += h * 0.5 * (f[k - 1] + f[k]);
    return acc;
  }
  std::vector<T> terms(n, T{});
  terms[0] = h * 0.5 * f[0];
  for (std::size_t k = 1; k + 1 < n; ++k) terms[k] = h * f[k];
  terms[n - 1] = h * 0.5 * f[n - 1];
  T t = pairwise_sum(terms);
  return t - (h * h / 12.0) * (d1_at(f, n - 1, h) - d1_at(f, 0, h));
}

// Adaptive Gauss-Kronrod-free quadrature for smooth integrands on [a,b]:
// nested Richardson on the corrected trapezoid. Used by oracles and the
// generic tortoise construction, not by inner loops.
inline double integrate_smooth(const std::function<double(double)>& f, double a, double b,
                               double reltol = 1e-12) {
  int n = 64;
  double prev = 0;
  for (int it = 0; it < 16; ++it, n *= 2) {
    double h = (b - a) / n;
    std::vector<double> v(n + 1);
    for (int i = 0; i <= n; ++i) v[i] = f(a + i * h);
    double cur = integrate(h, v);
    if (it > 2 && std::abs(cur - prev) <= reltol * (std::abs(cur) + 1e-300)) return cur;
    prev = cur;
  }
  return prev;
}

// --------------------------------------------------------------- hashing

// FNV-1a 64-bit.
inline std::uint64_t fnv1a(const void* data, std::size_t n,
                           std::uint64_t seed = 14695981039346656037ull) {
  const unsigned char* p = static_cast<const unsigned char*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s, std::uint64_t seed = 14695981039346656037ull) {
  return fnv1a(s.data(), s.size(), seed);
}

inline std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[i] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

}  // namespace wavetail
