#include <doctest.h>

#include <cmath>

#include "dpgeo/blowup.hpp"
#include "oracles.hpp"

using namespace dpgeo;

namespace {

double m0_antisym(double x) { return -8.0 * x * std::exp(-x * x); }

Field antisym(const Grid& g) { return Field::sample(g, m0_antisym); }

// Synthetic trajectory with 1/f = 1/f0 + rate * I0 * t.
BlowupCertificate synthetic(double rate) {
  BlowupCertificate c;
  c.I0 = -2.0;
  c.g0 = 1.5;
  c.T0 = -1.0 / (c.I0 * c.g0 * c.g0);
  const double f0 = c.g0 * c.g0;
  for (int k = 0; k <= 40; ++k) {
    BlowupSample s;
    s.t = 0.005 * k;
    s.f = 1.0 / (1.0 / f0 + rate * c.I0 * s.t);
    s.g = std::sqrt(s.f);
    s.I = c.I0 - s.t;
    s.g22 = s.f * s.f;
    c.trajectory.push_back(s);
  }
  return c;
}

}  // namespace

TEST_CASE("certificate for the canonical datum") {
  const Grid g(30.0, 4096);
  const BlowupCertificate c = make_blowup_certificate(antisym(g), 0.0);
  const double I0 = oracle::simpson([](double z) { return std::exp(-z) * m0_antisym(z); }, 0.0, 30.0);
  // u0 = G * m0 at 0 and its derivative through the split kernel
  const double left = oracle::simpson([](double y) { return std::exp(y) * m0_antisym(y); }, -30.0, 0.0);
  const double u0 = 0.5 * (left + I0), ux0 = 0.5 * (I0 - left);
  CHECK(c.I0 == doctest::Approx(I0).epsilon(1e-10));
  CHECK(c.g0 == doctest::Approx(u0 - ux0).epsilon(1e-10));
  CHECK(c.T0 == doctest::Approx(-1.0 / (I0 * (u0 - ux0) * (u0 - ux0))).epsilon(1e-9));
  // frozen
  CHECK(c.I0 == doctest::Approx(-1.817434557).epsilon(1e-9));
  CHECK(c.T0 == doctest::Approx(0.16658).epsilon(1e-4));
}

TEST_CASE("sign conditions") {
  const Grid g(30.0, 1024);
  CHECK(check_sign_conditions(antisym(g), 0.0).passed);
  const Field pos = Field::sample(g, [](double x) { return std::exp(-x * x); });
  const SignReport r = check_sign_conditions(pos, 0.0);
  CHECK_FALSE(r.passed);
  REQUIRE(r.offending_x.has_value());
  CHECK(*r.offending_x > 0.0);
  CHECK_THROWS_AS(make_blowup_certificate(pos, 0.0), Error);
  CHECK_THROWS_AS(make_blowup_certificate(Field::zeros(g), 0.0), Error);
}

TEST_CASE("riccati report on synthetic trajectories") {
  const RiccatiReport ok = verify_riccati_bound(synthetic(1.1), 30.0);
  CHECK(ok.riccati_ok);
  CHECK(ok.bound_ok);
  CHECK(ok.I_decreasing_negative);
  CHECK(ok.g_nondecreasing);
  REQUIRE(ok.threshold_cross_time.has_value());
  CHECK(*ok.threshold_cross_time < 0.2);

  const RiccatiReport slow = verify_riccati_bound(synthetic(0.5), 30.0);
  CHECK_FALSE(slow.riccati_ok);
  CHECK_FALSE(slow.bound_ok);
  CHECK_FALSE(slow.passed);

  BlowupCertificate two = synthetic(1.0);
  two.trajectory.resize(2);
  CHECK_FALSE(verify_riccati_bound(two).passed);
}

TEST_CASE("appendix inequalities") {
  const Grid g(30.0, 1024);
  const AppendixReport z = verify_appendix_inequalities(SolverState(0.0, Field::zeros(g)), 0.0);
  CHECK(z.holds1);
  CHECK(z.holds2);
  CHECK_FALSE(z.strict1);
  CHECK_FALSE(z.strict2);

  const SolverState s0(0.0, green_convolution(antisym(g)));
  const AppendixReport r = verify_appendix_inequalities(s0, 0.0);
  CHECK(r.strict1);
  CHECK(r.strict2);
  CHECK(r.M * r.I < 0.0);
  CHECK(r.rhs1 == doctest::Approx(r.M * r.I).epsilon(1e-12));
}

TEST_CASE("global certificate") {
  const Grid g(30.0, 1024);
  const Field m0 = Field::sample(g, [](double x) { return 0.5 * std::exp(-x * x); });
  GlobalCertificate c = make_global_certificate(m0);
  CHECK(c.m0_sign == 1);
  CHECK(c.l1_mass == doctest::Approx(0.5 * std::sqrt(M_PI)).epsilon(1e-12));
  CHECK_THROWS_AS(make_global_certificate(antisym(g)), Error);

  SolverConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 1.0;
  cfg.snapshot_stride = 10;
  const TimeSeries ts = run(green_convolution(m0), cfg);
  const GlobalReport rep = verify_global_bound(ts, c);
  CHECK(rep.passed);
  CHECK(rep.max_ux_excess < 0.0);
  CHECK(rep.worst_sign > -1e-8);
  CHECK(c.times.size() == ts.snapshots.size());
}
