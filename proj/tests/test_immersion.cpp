#include <doctest.h>

#include <cmath>

#include "dpgeo/immersion.hpp"

using namespace dpgeo;

namespace {

// Root of L(x) = sigma e^{4x} - b0^2 e^{8x} - 1 in [lo, hi] by plain bisection.
double root_of_L(double sigma, double b0, double lo, double hi) {
  auto L = [&](double x) { return sigma * std::exp(4 * x) - b0 * b0 * std::exp(8 * x) - 1.0; };
  const bool rising = L(lo) < 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((L(mid) < 0.0) == rising ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SolverState gaussian_state(double t_end) {
  const Grid g(30.0, 1024);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = t_end;
  cfg.snapshot_stride = static_cast<std::size_t>(std::lround(t_end / cfg.dt));
  return run(Field::sample(g, [](double x) { return std::exp(-0.5 * x * x); }), cfg).final_state();
}

}  // namespace

TEST_CASE("mu = 0 validity interval matches the roots of L") {
  for (auto [sigma, b0] : {std::pair{3.0, 1.0}, std::pair{5.0, 0.5}, std::pair{2.5, 1.2}}) {
    const ValidityInterval iv = mu0_validity_interval(sigma, b0);
    const double peak = 0.25 * std::log(sigma / (2 * b0 * b0));
    CHECK(std::abs(iv.lo - root_of_L(sigma, b0, peak - 20, peak)) < 1e-10);
    CHECK(std::abs(iv.hi - root_of_L(sigma, b0, peak, peak + 20)) < 1e-10);
  }
  const ValidityInterval open = mu0_validity_interval(4.0, 0.0);
  CHECK(open.lo == doctest::Approx(-std::log(4.0) / 4));
  CHECK(std::isinf(open.hi));
}

TEST_CASE("second form parameters") {
  SecondFormParams p;
  p.sigma = 1.0;
  p.b0 = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p.sigma = 3.0;
  p.branch = 0;
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("closed-form second form satisfies Gauss and Codazzi") {
  const SolverState st = gaussian_state(0.2);
  const Grid& g = st.grid();
  SecondFormParams p;
  const ConventionVerdict cv = resolve_convention(st, p, 0.0);
  // frozen: the derivative is read in z = 2x
  CHECK(cv.chosen == DerivativeConvention::d_dz);
  CHECK(cv.score_dz < 1e-6);
  CHECK(cv.score_dx > 1e-3);

  for (auto [sigma, b0] : {std::pair{3.0, 1.0}, std::pair{5.0, 0.5}}) {
    p.sigma = sigma;
    p.b0 = b0;
    const SecondFormField sff = second_form_mu0(p, g);
    REQUIRE(sff.size() > 2);
    for (double x : sff.x) {
      CHECK(x > sff.interval.lo);
      CHECK(x < sff.interval.hi);
    }
    const BonnetReport br = bonnet_residuals(st, coframe(st, {0.0, 1}), sff);
    CHECK(br.points > 0);
    CHECK(br.gauss_scalar < 1e-6);
    CHECK(br.codazzi1 < 1e-6);
    CHECK(br.codazzi2 < 1e-6);
  }
}

TEST_CASE("mu != 0 second form from the ODE") {
  const SolverState st = gaussian_state(0.2);
  SecondFormParams p;
  p.b0 = 1.0;
  p.x_begin = 0.05;
  p.x_end = 1.5;
  const SecondFormField sff = second_form_ode(p, st.grid(), 0.5);
  REQUIRE(sff.size() >= 2);
  for (double d : sff.delta) CHECK(d > 0.0);
  const BonnetReport br = bonnet_residuals(st, coframe(st, {0.5, 1}), sff);
  CHECK(std::max({br.gauss_scalar, br.codazzi1, br.codazzi2}) < 1e-6);
}
