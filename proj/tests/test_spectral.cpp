#include <doctest.h>

#include <cmath>

#include "dpgeo/error.hpp"
#include "dpgeo/quadrature.hpp"
#include "dpgeo/spectral.hpp"
#include "oracles.hpp"

using namespace dpgeo;

namespace {

double sup_diff(const Field& f, const std::function<double(double)>& g) {
  double e = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) e = std::max(e, std::abs(f[i] - g(f.grid().node(i))));
  return e;
}

}  // namespace

TEST_CASE("grid layout") {
  const Grid g(10.0, 64);
  CHECK(g.node(0) == -10.0);
  CHECK(g.spacing() == doctest::Approx(20.0 / 64));
  CHECK(g.spectrum_size() == 33);
  const auto k = g.wavenumbers();
  CHECK(k[1] == doctest::Approx(M_PI / 10.0));
  CHECK(k[32] == doctest::Approx(-32 * M_PI / 10.0));
  CHECK(k[63] == doctest::Approx(-M_PI / 10.0));
  CHECK(g.reduce(10.5) == doctest::Approx(-9.5));
  CHECK_THROWS_AS(Grid(1.0, 63), Error);
  CHECK_THROWS_AS(Grid(-1.0, 64), Error);
}

TEST_CASE("forward/backward round trip") {
  const Grid g(15.0, 256);
  const Field f = Field::sample(g, [](double x) { return std::exp(-x * x) * std::cos(3 * x); });
  CHECK(sup_diff(backward(forward(f)), [&](double x) { return std::exp(-x * x) * std::cos(3 * x); }) < 1e-14);
}

TEST_CASE("spectral derivatives of a periodic mode") {
  const double L = M_PI;
  const Grid g(L, 64);
  const Field f = Field::sample(g, [](double x) { return std::sin(5 * x); });
  CHECK(sup_diff(deriv(f, 1), [](double x) { return 5 * std::cos(5 * x); }) < 1e-12);
  CHECK(sup_diff(deriv(f, 2), [](double x) { return -25 * std::sin(5 * x); }) < 1e-11);
  CHECK(sup_diff(deriv(f, 3), [](double x) { return -125 * std::cos(5 * x); }) < 1e-10);
}

TEST_CASE("helmholtz inverse undoes (a - d^2)") {
  const Grid g(20.0, 512);
  for (double a : {1.0, 4.0}) {
    const Field rhs = Field::sample(g, [a](double x) { return (a + 2.0 - 4.0 * x * x) * std::exp(-x * x); });
    CHECK(sup_diff(helmholtz_inverse(rhs, a), [](double x) { return std::exp(-x * x); }) < 1e-13);
  }
  CHECK_THROWS_AS(helmholtz_inverse(Field::zeros(g), 0.0), Error);
}

TEST_CASE("green convolution matches the erfc closed form") {
  const Grid g(30.0, 1024);
  const Field f = Field::sample(g, [](double x) { return std::exp(-x * x); });
  const auto ref = [](double x) { return oracle::green_gaussian(1.0, x); };
  const auto dref = [](double x) { return oracle::green_gaussian_dx(1.0, x); };
  CHECK(sup_diff(green_convolution(f), ref) < 1e-10);
  CHECK(sup_diff(green_derivative_convolution(f), dref) < 1e-10);
  // FFT route agrees with the quadrature route
  CHECK(sup_diff(helmholtz_inverse(f, 1.0), ref) < 1e-12);
  CHECK(sup_diff(dx_inv_helmholtz(f), dref) < 1e-12);
}

TEST_CASE("kernel convolution for general a") {
  const Grid g(30.0, 1024);
  const Field f = Field::sample(g, [](double x) { return std::exp(-x * x); });
  const Field k = helmholtz_kernel_convolution(f, 4.0);
  const Field s = helmholtz_inverse(f, 4.0);
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(k[i] - s[i]));
  CHECK(e < 1e-10);
}

TEST_CASE("edge decay is enforced") {
  const Grid g(10.0, 256);
  const Field bad = Field::sample(g, [](double x) { return std::exp(-0.01 * x * x); });
  CHECK(edge_level(bad) > 1e-2);
  CHECK_THROWS_AS(green_convolution(bad), Error);
  CHECK_THROWS_AS(check_edge_decay(bad, 1e-10, "test"), Error);
}

TEST_CASE("shift, interpolation and the interpolant agree with the function") {
  const Grid g(20.0, 512);
  const auto fn = [](double x) { return std::exp(-0.5 * x * x); };
  const Field f = Field::sample(g, fn);
  CHECK(sup_diff(shift(f, 0.123), [&](double x) { return fn(x + 0.123); }) < 1e-13);
  CHECK(interpolate(f, 0.777) == doctest::Approx(fn(0.777)).epsilon(1e-13));
  const SpectralInterpolant si(f);
  double d[3];
  si.derivatives(-1.3, 2, d);
  CHECK(d[0] == doctest::Approx(fn(-1.3)).epsilon(1e-13));
  CHECK(d[1] == doctest::Approx(1.3 * fn(-1.3)).epsilon(1e-12));
  CHECK(d[2] == doctest::Approx((1.69 - 1.0) * fn(-1.3)).epsilon(1e-12));
  // whole-cell shift is an exact rotation
  const Field r = shift(f, 3 * g.spacing());
  const Field c = f.shifted_cells(-3);
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(r[i] - c[i]));
  CHECK(e < 1e-14);
}

TEST_CASE("dealiased product removes the top third") {
  const Grid g(M_PI, 48);
  const Field a = Field::sample(g, [](double x) { return std::cos(10 * x); });
  // cos^2(10x) = (1 + cos 20x)/2 and mode 20 is above N/3 = 16
  const Field p = dealiased_product(a, a);
  CHECK(sup_diff(p, [](double) { return 0.5; }) < 1e-14);
  const Field b = Field::sample(g, [](double x) { return std::cos(3 * x); });
  CHECK(sup_diff(dealiased_product(b, b), [](double x) { return 0.5 + 0.5 * std::cos(6 * x); }) < 1e-14);
}

TEST_CASE("quadrature") {
  const Grid g(20.0, 512);
  const Field f = Field::sample(g, [](double x) { return std::exp(-x * x); });
  CHECK(riemann_sum(f) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-14));
  CHECK(integrate(f, -1.0, 0.7) == doctest::Approx(0.5 * std::sqrt(M_PI) * (std::erf(0.7) + std::erf(1.0))).epsilon(1e-12));
  CHECK(integrate(f, 0.3, 0.3) == 0.0);
  const ExponentialSplit sp(f, 1.0);
  const auto parts = oracle::green_gaussian_parts(1.0, 0.4);
  CHECK(sp.left_at(0.4) == doctest::Approx(parts.left).epsilon(1e-10));
  CHECK(sp.right_at(0.4) == doctest::Approx(parts.right).epsilon(1e-10));
}
