#pragma once

#include <vector>

#include "dpgeo/grid.hpp"

namespace dpgeo {

// Uniform-weight sum times h (spectrally accurate for periodic decaying integrands).
double riemann_sum(const Field& f);

// Integral of f over [a, b] (inside [-L, L]) using a local degree-11 Lagrange
// interpolant in each cell and 8-point Gauss-Legendre. Independent of the FFT path.
double integrate(const Field& f, double a, double b);

// Exponentially weighted one-sided integrals of f on the box:
//   left(x)  = int_{-L}^{x} exp(-r (x - y)) f(y) dy
//   right(x) = int_{x}^{L}  exp(-r (y - x)) f(y) dy
class ExponentialSplit {
 public:
  ExponentialSplit(const Field& f, double rate);

  const std::vector<double>& left() const { return left_; }
  const std::vector<double>& right() const { return right_; }
  double left_at(double x) const;
  double right_at(double x) const;

 private:
  Field f_;
  double rate_;
  std::vector<double> left_;
  std::vector<double> right_;
};

}  // namespace dpgeo
