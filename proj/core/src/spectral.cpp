#include "dpgeo/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "dpgeo/error.hpp"
#include "dpgeo/quadrature.hpp"

namespace dpgeo {

namespace {

// One r2c/c2r plan pair per size. Planning is serialized; execution uses the
// new-array interface so plans can be shared across threads.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n) : n_(n) {
    std::vector<double> r(n);
    std::vector<Complex> c(n / 2 + 1);
    auto* cr = reinterpret_cast<fftw_complex*>(c.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    r2c_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), r.data(), cr, flags);
    c2r_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), cr, r.data(), flags);
    if (!r2c_ || !c2r_) throw Error(ErrorKind::invalid_grid, "FFTW planning failed");
  }
  ~FftPlan() {
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void r2c(std::vector<double>& in, std::vector<Complex>& out) const {
    fftw_execute_dft_r2c(r2c_, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
  }
  // Destroys the input.
  void c2r(std::vector<Complex>& in, std::vector<double>& out) const {
    fftw_execute_dft_c2r(c2r_, reinterpret_cast<fftw_complex*>(in.data()), out.data());
  }

 private:
  std::size_t n_;
  fftw_plan r2c_;
  fftw_plan c2r_;
};

const FftPlan& plan_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<FftPlan>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, std::make_unique<FftPlan>(n)).first;
  return *it->second;
}

std::size_t cutoff(std::size_t n) { return n / 3; }

}  // namespace

Spectrum forward(const Field& f) {
  const std::size_t n = f.size();
  std::vector<double> in(f.data());
  std::vector<Complex> out(n / 2 + 1);
  plan_for(n).r2c(in, out);
  const double scale = 1.0 / static_cast<double>(n);
  for (auto& c : out) c *= scale;
  return Spectrum{f.grid(), std::move(out)};
}

Field backward(const Spectrum& s) {
  const std::size_t n = s.grid.size();
  if (s.c.size() != n / 2 + 1) throw Error(ErrorKind::grid_mismatch, "spectrum length mismatch");
  std::vector<Complex> in(s.c);
  std::vector<double> out(n);
  plan_for(n).c2r(in, out);
  return Field(s.grid, std::move(out));
}

Spectrum deriv(const Spectrum& s, int order) {
  if (order < 0 || order > 4)
    throw Error(ErrorKind::invalid_argument,
                "derivative order must be in [0, 4], got " + std::to_string(order));
  Spectrum out = s;
  if (order == 0) return out;
  const std::size_t nyq = s.grid.size() / 2;
  for (std::size_t j = 0; j < out.c.size(); ++j) {
    const double k = s.grid.wavenumber(j);
    Complex m(1.0, 0.0);
    for (int p = 0; p < order; ++p) m *= Complex(0.0, k);
    out.c[j] *= m;
  }
  if (order % 2 == 1) out.c[nyq] = 0.0;
  return out;
}

Field deriv(const Field& f, int order) {
  if (order < 1 || order > 4)
    throw Error(ErrorKind::invalid_argument,
                "derivative order must be in [1, 4], got " + std::to_string(order));
  return backward(deriv(forward(f), order));
}

Field helmholtz_inverse(const Field& f, double a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw Error(ErrorKind::invalid_argument, "helmholtz_inverse needs a > 0");
  Spectrum s = forward(f);
  for (std::size_t j = 0; j < s.c.size(); ++j) {
    const double k = s.grid.wavenumber(j);
    s.c[j] /= (a + k * k);
  }
  return backward(s);
}

Field dx_inv_helmholtz(const Field& f) {
  Spectrum s = forward(f);
  for (std::size_t j = 0; j < s.c.size(); ++j) {
    const double k = s.grid.wavenumber(j);
    s.c[j] *= Complex(0.0, k / (1.0 + k * k));
  }
  s.c[s.grid.size() / 2] = 0.0;
  return backward(s);
}

Field momentum(const Field& u) {
  Spectrum s = forward(u);
  for (std::size_t j = 0; j < s.c.size(); ++j) {
    const double k = s.grid.wavenumber(j);
    s.c[j] *= (1.0 + k * k);
  }
  return backward(s);
}

Field green_convolution(const Field& f, double edge_tol) {
  check_edge_decay(f, edge_tol, "green_convolution");
  ExponentialSplit split(f, 1.0);
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * (split.left()[i] + split.right()[i]);
  return Field(f.grid(), std::move(v));
}

Field green_derivative_convolution(const Field& f, double edge_tol) {
  check_edge_decay(f, edge_tol, "green_derivative_convolution");
  ExponentialSplit split(f, 1.0);
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.5 * (split.right()[i] - split.left()[i]);
  return Field(f.grid(), std::move(v));
}

Field helmholtz_kernel_convolution(const Field& f, double a, double edge_tol) {
  if (!(a > 0.0)) throw Error(ErrorKind::invalid_argument, "kernel convolution needs a > 0");
  check_edge_decay(f, edge_tol, "helmholtz_kernel_convolution");
  const double r = std::sqrt(a);
  ExponentialSplit split(f, r);
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = (split.left()[i] + split.right()[i]) / (2.0 * r);
  return Field(f.grid(), std::move(v));
}

namespace {
void truncate(Spectrum& s) {
  const std::size_t kc = cutoff(s.grid.size());
  for (std::size_t j = kc + 1; j < s.c.size(); ++j) s.c[j] = 0.0;
}
}  // namespace

Field lowpass(const Field& f) {
  Spectrum s = forward(f);
  truncate(s);
  return backward(s);
}

Field dealiased_product(const Field& a, const Field& b) {
  require_same_grid(a, b, "dealiased_product");
  const Field af = lowpass(a);
  const Field bf = (&a == &b) ? af : lowpass(b);
  return lowpass(hadamard(af, bf));
}

Field shift(const Field& f, double dx) {
  Spectrum s = forward(f);
  const std::size_t nyq = f.size() / 2;
  for (std::size_t j = 0; j < s.c.size(); ++j) {
    const double k = s.grid.wavenumber(j);
    if (j == nyq)
      s.c[j] *= std::cos(k * dx);
    else
      s.c[j] *= std::polar(1.0, k * dx);
  }
  return backward(s);
}

SpectralInterpolant::SpectralInterpolant(const Field& f) : s_(forward(f)) {}
SpectralInterpolant::SpectralInterpolant(Spectrum s) : s_(std::move(s)) {}

double SpectralInterpolant::value(double x) const {
  double out[1];
  derivatives(x, 0, out);
  return out[0];
}

void SpectralInterpolant::derivatives(double x, int max_order, double* out) const {
  if (max_order < 0 || max_order > 4)
    throw Error(ErrorKind::invalid_argument, "interpolant derivative order must be in [0, 4]");
  const Grid& g = s_.grid;
  const std::size_t nyq = g.size() / 2;
  const double theta = std::numbers::pi * (x + g.half_length()) / g.half_length();
  for (int d = 0; d <= max_order; ++d) out[d] = 0.0;
  out[0] = s_.c[0].real();
  const Complex step = std::polar(1.0, theta);
  Complex z = step;
  for (std::size_t j = 1; j < nyq; ++j) {
    if (j % 64 == 0) z = std::polar(1.0, theta * static_cast<double>(j));
    const double k = g.wavenumber(j);
    Complex term = 2.0 * s_.c[j] * z;
    for (int d = 0; d <= max_order; ++d) {
      out[d] += term.real();
      term *= Complex(0.0, k);
    }
    z *= step;
  }
  // Nyquist mode, symmetric real interpretation: Re(c) cos(k (x + L)).
  const double kn = g.wavenumber(nyq);
  const double cn = s_.c[nyq].real();
  const double ph = kn * (x + g.half_length());
  const double c = std::cos(ph), s = std::sin(ph);
  const double vals[5] = {c, -kn * s, -kn * kn * c, kn * kn * kn * s, kn * kn * kn * kn * c};
  for (int d = 0; d <= max_order; ++d) out[d] += cn * vals[d];
}

double interpolate(const Field& f, double x) {
  const Grid& g = f.grid();
  const double xr = g.reduce(x);
  const double s = (xr + g.half_length()) / g.spacing();
  const double si = std::round(s);
  if (s == si) {
    std::size_t i = static_cast<std::size_t>(si) % g.size();
    return f[i];
  }
  return SpectralInterpolant(f).value(xr);
}

double edge_level(const Field& f) {
  const Grid& g = f.grid();
  const double bound = (1.0 - edge_fraction) * g.half_length();
  double level = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = g.node(i);
    if (x <= -bound || x >= bound) level = std::max(level, std::abs(f[i]));
  }
  return level;
}

void check_edge_decay(const Field& f, double tol, const char* what) {
  for (double v : f.values())
    if (!std::isfinite(v))
      throw Error(ErrorKind::non_decaying_data, std::string(what) + ": non-finite sample");
  const double level = edge_level(f);
  if (level > tol)
    throw Error(ErrorKind::domain_too_small,
                std::string(what) + ": field magnitude " + std::to_string(level) +
                    " at the box edge exceeds tolerance; enlarge the domain");
}

double trusted_half_length(const Grid& g) { return (1.0 - edge_fraction) * g.half_length(); }

}  // namespace dpgeo
