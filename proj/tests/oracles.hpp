#pragma once

// Closed forms and brute-force quadratures used as independent references.

#include <cmath>
#include <functional>

namespace oracle {

// (1/2) int exp(-|x - y|) exp(-a y^2) dy, split at x:
//   left  = int_{-inf}^x exp(y - x) exp(-a y^2) dy
//   right = int_x^{inf}  exp(x - y) exp(-a y^2) dy
struct GreenGaussian {
  double left, right;
};

inline GreenGaussian green_gaussian_parts(double a, double x) {
  const double c = 1.0 / (2.0 * a), s = std::sqrt(a);
  const double pre = 0.5 * std::sqrt(M_PI / a) * std::exp(1.0 / (4.0 * a));
  return {std::exp(-x) * pre * std::erfc(s * (c - x)), std::exp(x) * pre * std::erfc(s * (c + x))};
}

inline double green_gaussian(double a, double x) {
  const auto p = green_gaussian_parts(a, x);
  return 0.5 * (p.left + p.right);
}

inline double green_gaussian_dx(double a, double x) {
  const auto p = green_gaussian_parts(a, x);
  return 0.5 * (p.right - p.left);
}

// Composite Simpson with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace oracle
