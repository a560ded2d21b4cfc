#include "dpgeo/quadrature.hpp"

#include <array>
#include <cmath>

#include "dpgeo/error.hpp"

namespace dpgeo {

namespace {

constexpr int kStencil = 12;
constexpr int kStencilLeft = 5;  // stencil covers nodes i-5 .. i+6 for cell [x_i, x_{i+1}]
constexpr int kGauss = 8;

// Gauss-Legendre nodes/weights on [0, 1].
constexpr std::array<double, kGauss> kGaussNode = {
    0.019855071751231856, 0.10166676129318664, 0.2372337950418355, 0.4082826787521751,
    0.5917173212478249,   0.7627662049581645,  0.8983332387068134, 0.9801449282487681};
constexpr std::array<double, kGauss> kGaussWeight = {
    0.05061426814518813, 0.11119051722668724, 0.15685332293894363, 0.18134189168918100,
    0.18134189168918100, 0.15685332293894363, 0.11119051722668724, 0.05061426814518813};

void lagrange_weights(double s, double* w) {
  // Nodes at integer offsets p - kStencilLeft, p = 0..kStencil-1, relative to x_i in units of h.
  for (int p = 0; p < kStencil; ++p) {
    const double xp = p - kStencilLeft;
    double num = 1.0, den = 1.0;
    for (int q = 0; q < kStencil; ++q) {
      if (q == p) continue;
      const double xq = q - kStencilLeft;
      num *= (s - xq);
      den *= (xp - xq);
    }
    w[p] = num / den;
  }
}

struct GaussTable {
  std::array<std::array<double, kStencil>, kGauss> w;
  GaussTable() {
    for (int g = 0; g < kGauss; ++g) lagrange_weights(kGaussNode[g], w[g].data());
  }
};

const GaussTable& gauss_table() {
  static const GaussTable t;
  return t;
}

double stencil_value(const std::vector<double>& v, long i, const double* w) {
  const long n = static_cast<long>(v.size());
  double acc = 0.0;
  for (int p = 0; p < kStencil; ++p) {
    long j = ((i + p - kStencilLeft) % n + n) % n;
    acc += w[p] * v[static_cast<std::size_t>(j)];
  }
  return acc;
}

// int over [x_i + s0 h, x_i + s1 h] of weight(y) f(y) dy, 0 <= s0 <= s1 <= 1.
template <class Weight>
double cell_integral(const Field& f, long i, double s0, double s1, Weight weight) {
  const double h = f.grid().spacing();
  const double xi = f.grid().node(0) + static_cast<double>(i) * h;
  const double span = s1 - s0;
  if (span <= 0.0) return 0.0;
  double acc = 0.0;
  const bool full = (s0 == 0.0 && s1 == 1.0);
  std::array<double, kStencil> w{};
  for (int g = 0; g < kGauss; ++g) {
    const double s = s0 + span * kGaussNode[g];
    const double* lw;
    if (full) {
      lw = gauss_table().w[g].data();
    } else {
      lagrange_weights(s, w.data());
      lw = w.data();
    }
    acc += kGaussWeight[g] * weight(xi + s * h) * stencil_value(f.data(), i, lw);
  }
  return acc * span * h;
}

struct CellPos {
  long index;
  double frac;
};

CellPos locate(const Grid& g, double x) {
  const double L = g.half_length();
  if (x < -L - 1e-12 * L || x > L + 1e-12 * L)
    throw Error(ErrorKind::invalid_argument, "quadrature point outside the box");
  double s = (x + L) / g.spacing();
  long i = static_cast<long>(std::floor(s));
  const long n = static_cast<long>(g.size());
  if (i >= n) i = n - 1;
  if (i < 0) i = 0;
  double frac = s - static_cast<double>(i);
  frac = std::min(1.0, std::max(0.0, frac));
  return {i, frac};
}

}  // namespace

double riemann_sum(const Field& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v;
  return acc * f.grid().spacing();
}

double integrate(const Field& f, double a, double b) {
  if (b < a) return -integrate(f, b, a);
  const auto one = [](double) { return 1.0; };
  const CellPos pa = locate(f.grid(), a);
  const CellPos pb = locate(f.grid(), b);
  if (pa.index == pb.index) return cell_integral(f, pa.index, pa.frac, pb.frac, one);
  double acc = cell_integral(f, pa.index, pa.frac, 1.0, one);
  for (long i = pa.index + 1; i < pb.index; ++i) acc += cell_integral(f, i, 0.0, 1.0, one);
  acc += cell_integral(f, pb.index, 0.0, pb.frac, one);
  return acc;
}

ExponentialSplit::ExponentialSplit(const Field& f, double rate) : f_(f), rate_(rate) {
  if (!(rate > 0.0)) throw Error(ErrorKind::invalid_argument, "exponential split rate must be positive");
  const std::size_t n = f.size();
  const double h = f.grid().spacing();
  const double decay = std::exp(-rate * h);
  left_.assign(n, 0.0);
  right_.assign(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double xe = f.grid().node(i + 1);
    const double cell = cell_integral(f, static_cast<long>(i), 0.0, 1.0,
                                      [&](double y) { return std::exp(-rate * (xe - y)); });
    left_[i + 1] = decay * left_[i] + cell;
  }
  double acc = 0.0;  // value at x_N = L
  for (std::size_t k = n; k-- > 0;) {
    const double xs = f.grid().node(k);
    const double cell = cell_integral(f, static_cast<long>(k), 0.0, 1.0,
                                      [&](double y) { return std::exp(-rate * (y - xs)); });
    acc = decay * acc + cell;
    right_[k] = acc;
  }
}

double ExponentialSplit::left_at(double x) const {
  const CellPos p = locate(f_.grid(), x);
  const double xi = f_.grid().node(static_cast<std::size_t>(p.index));
  const double xx = xi + p.frac * f_.grid().spacing();
  const double r = rate_;
  return std::exp(-r * (xx - xi)) * left_[static_cast<std::size_t>(p.index)] +
         cell_integral(f_, p.index, 0.0, p.frac, [&](double y) { return std::exp(-r * (xx - y)); });
}

double ExponentialSplit::right_at(double x) const {
  const CellPos p = locate(f_.grid(), x);
  const std::size_t n = f_.size();
  const double h = f_.grid().spacing();
  const double xi = f_.grid().node(static_cast<std::size_t>(p.index));
  const double xx = xi + p.frac * h;
  const double r = rate_;
  const std::size_t next = static_cast<std::size_t>(p.index) + 1;
  const double tail = next < n ? right_[next] : 0.0;
  return std::exp(-r * (xi + h - xx)) * tail +
         cell_integral(f_, p.index, p.frac, 1.0, [&](double y) { return std::exp(-r * (y - xx)); });
}

}  // namespace dpgeo
