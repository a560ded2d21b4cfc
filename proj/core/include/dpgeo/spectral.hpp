#pragma once

#include <complex>
#include <vector>

#include "dpgeo/grid.hpp"

namespace dpgeo {

using Complex = std::complex<double>;

// Half spectrum (N/2 + 1 coefficients). Normalized so that
//   f(x) = sum_j c_j exp(i k_j (x + L))   (Hermitian extension implied)
// and backward(forward(f)) == f.
struct Spectrum {
  Grid grid;
  std::vector<Complex> c;
};

constexpr double default_edge_tol = 1e-10;
constexpr double edge_fraction = 0.05;

Spectrum forward(const Field& f);
Field backward(const Spectrum& s);

Field deriv(const Field& f, int order);
Spectrum deriv(const Spectrum& s, int order);
Field helmholtz_inverse(const Field& f, double a);
Field dx_inv_helmholtz(const Field& f);
// (1 - d^2/dx^2) f
Field momentum(const Field& u);

// Real-space quadrature of G * f with G(x) = exp(-|x|)/2, periodic images ignored.
Field green_convolution(const Field& f, double edge_tol = default_edge_tol);
// Real-space quadrature of G' * f with G'(x) = -sgn(x) exp(-|x|)/2.
Field green_derivative_convolution(const Field& f, double edge_tol = default_edge_tol);
// Real-space quadrature of (a - d^2/dx^2)^{-1} f with kernel exp(-sqrt(a)|x|)/(2 sqrt(a)).
Field helmholtz_kernel_convolution(const Field& f, double a, double edge_tol = default_edge_tol);

// 2/3-rule filtered product: both inputs and the result are truncated above N/3.
Field dealiased_product(const Field& a, const Field& b);
Field lowpass(const Field& f);

// Samples of f(x_i + dx), exact for band-limited f.
Field shift(const Field& f, double dx);

// Trigonometric interpolation at a single point.
double interpolate(const Field& f, double x);

// Off-grid evaluation of a fixed spectrum and its derivatives.
class SpectralInterpolant {
 public:
  explicit SpectralInterpolant(const Field& f);
  explicit SpectralInterpolant(Spectrum s);

  double value(double x) const;
  // out[d] = d-th derivative at x, for d = 0..max_order (max_order <= 4).
  void derivatives(double x, int max_order, double* out) const;

  const Spectrum& spectrum() const { return s_; }

 private:
  Spectrum s_;
};

// max |f| over the outer edge_fraction of the box at either end.
double edge_level(const Field& f);
void check_edge_decay(const Field& f, double tol, const char* what);

// Interior region [-(1 - edge_fraction) L, (1 - edge_fraction) L].
double trusted_half_length(const Grid& g);

}  // namespace dpgeo
