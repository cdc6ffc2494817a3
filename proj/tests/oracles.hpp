#ifndef SPBOUNDS_TESTS_ORACLES_HPP
#define SPBOUNDS_TESTS_ORACLES_HPP

// Reference computations used only by the tests. None of these touch the
// Eigen solvers the library relies on: plain loops over std::vector, so a
// bug in the library's linear algebra cannot hide in its own oracle.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace ref {

using Dense = std::vector<std::vector<double>>;

/// Root of f in [lo, hi] by bisection; f(lo) and f(hi) must differ in sign.
inline double bisect(const std::function<long double(long double)>& f, long double lo, long double hi) {
  long double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const long double mid = 0.5L * (lo + hi);
    const long double fm = f(mid);
    if (fm == 0.0L) return static_cast<double>(mid);
    if ((fm > 0.0L) == (flo > 0.0L)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return static_cast<double>(0.5L * (lo + hi));
}

/// Smaller positive root of lambda^3 - lambda^2 - lambda + c for 0 < c < 1.
/// p(0) = c > 0 and p(1) = c - 1 < 0, so the root is bracketed by [0, 1].
inline double toy_cubic_small_root(double c) {
  return bisect([c](long double x) { return x * x * x - x * x - x + static_cast<long double>(c); }, 0.0L, 1.0L);
}

/// Cyclic Jacobi eigenvalue iteration; returns eigenvalues descending.
inline std::vector<double> jacobi_eigenvalues(Dense a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    }
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p];
          const double akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k];
          const double aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i][i];
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// Closed-form eigenvalues of a symmetric 3x3 matrix (trigonometric method), descending.
inline std::vector<double> sym3_eigenvalues(const Dense& a) {
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) + (a[2][2] - q) * (a[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  if (p == 0.0) return {q, q, q};
  double b[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
  }
  const double detB = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                      b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                      b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double r = std::clamp(detB / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::vector<double> out{e1, e2, e3};
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

/// max |x^T y| over unit x in span{x1, x2} and unit y in span{y1, y2} (bases
/// orthonormal; pass an empty second vector for a 1-D subspace), found by a
/// dense angle grid followed by local refinement.
inline double brute_force_max_cosine(const std::vector<double>& x1, const std::vector<double>& x2,
                                     const std::vector<double>& y1, const std::vector<double>& y2) {
  auto point = [](const std::vector<double>& u, const std::vector<double>& v, double t) {
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::cos(t) * u[i] + (v.empty() ? 0.0 : std::sin(t) * v[i]);
    return out;
  };
  auto value = [&](double s, double t) {
    const auto x = point(x1, x2, s);
    const auto y = point(y1, y2, t);
    double d = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) d += x[i] * y[i];
    return std::abs(d);
  };
  const int grid = 720;
  double best = -1.0, bs = 0.0, bt = 0.0;
  const int ns = x2.empty() ? 1 : grid;
  const int nt = y2.empty() ? 1 : grid;
  for (int i = 0; i < ns; ++i) {
    for (int j = 0; j < nt; ++j) {
      const double s = std::numbers::pi * i / grid;
      const double t = std::numbers::pi * j / grid;
      const double v = value(s, t);
      if (v > best) {
        best = v;
        bs = s;
        bt = t;
      }
    }
  }
  double step = std::numbers::pi / grid;
  for (int it = 0; it < 60; ++it) {
    bool moved = false;
    for (int ds = -1; ds <= 1; ++ds) {
      for (int dt = -1; dt <= 1; ++dt) {
        const double s = bs + (x2.empty() ? 0 : ds) * step;
        const double t = bt + (y2.empty() ? 0 : dt) * step;
        const double v = value(s, t);
        if (v > best) {
          best = v;
          bs = s;
          bt = t;
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

}  // namespace ref

#endif  // SPBOUNDS_TESTS_ORACLES_HPP
