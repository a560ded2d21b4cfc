#include <doctest.h>

#include <cmath>

#include "dpgeo/dp_solver.hpp"
#include "dpgeo/quadrature.hpp"
#include "oracles.hpp"

using namespace dpgeo;

namespace {

Field gaussian(const Grid& g, double A = 1.0, double w = 1.0) {
  return Field::sample(g, [=](double x) { return A * std::exp(-0.5 * x * x / (w * w)); });
}

double sup_diff(const Field& a, const Field& b) { return (a - b).sup_norm(); }

}  // namespace

TEST_CASE("dp_rhs against the closed-form nonlocal term") {
  const Grid g(30.0, 1024);
  const Field u = Field::sample(g, [](double x) { return std::exp(-x * x); });
  // u_t = -u u_x - 3/2 d/dx G*(u^2), u^2 = exp(-2x^2)
  const Field ref = Field::sample(g, [](double x) {
    return 2.0 * x * std::exp(-2.0 * x * x) - 1.5 * oracle::green_gaussian_dx(2.0, x);
  });
  CHECK(sup_diff(dp_rhs(u), ref) < 1e-10);
  CHECK(sup_diff(dp_rhs(u, {.dealias = false}), ref) < 1e-10);
}

TEST_CASE("zero stays zero") {
  const Grid g(10.0, 128);
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 0.1;
  const TimeSeries ts = run(Field::zeros(g), cfg);
  CHECK(ts.status == RunStatus::completed);
  CHECK(ts.snapshots.size() == 11);
  CHECK(ts.final_state().u().sup_norm() == 0.0);
  const Conserved c = conserved_quantities(ts.final_state());
  CHECK(c.e1 == 0.0);
  CHECK(c.e2 == 0.0);
  CHECK(c.e3 == 0.0);
}

TEST_CASE("state carries m = (1 - d^2) u") {
  const Grid g(20.0, 512);
  const SolverState s(0.0, gaussian(g));
  const Field ref = Field::sample(g, [](double x) { return (2.0 - x * x) * std::exp(-0.5 * x * x); });
  CHECK(sup_diff(s.m(), ref) < 1e-12);
}

TEST_CASE("conserved quantities of the gaussian") {
  const Grid g(30.0, 1024);
  const SolverState s(0.0, gaussian(g, 1.0, 1.0));
  const Conserved c = conserved_quantities(s);
  CHECK(c.e1 == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-13));
  CHECK(c.e3 == doctest::Approx(std::sqrt(2.0 * M_PI / 3.0)).epsilon(1e-13));
  CHECK(c.e2 == doctest::Approx(e2_by_kernel(s)).epsilon(1e-10));
}

TEST_CASE("step is fourth order") {
  const Grid g(30.0, 512);
  const SolverState s0(0.0, gaussian(g));
  double diff[2];
  int i = 0;
  for (double dt : {0.04, 0.02}) {
    const SolverState one = step(s0, dt);
    const SolverState two = step(step(s0, 0.5 * dt), 0.5 * dt);
    diff[i++] = sup_diff(one.u(), two.u());
  }
  const double ratio = diff[0] / diff[1];
  CHECK(ratio > 24.0);
  CHECK(ratio < 40.0);
}

TEST_CASE("step commutes with whole-cell translation") {
  const Grid g(30.0, 512);
  const Field u = gaussian(g);
  const SolverState a = step(SolverState(0.0, u.shifted_cells(17)), 0.01);
  const SolverState b = step(SolverState(0.0, u), 0.01);
  CHECK(sup_diff(a.u(), b.u().shifted_cells(17)) < 1e-14);
}

TEST_CASE("run conserves E1, E2, E3 on the gaussian") {
  const Grid g(30.0, 1024);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.5;
  cfg.snapshot_stride = 50;
  const TimeSeries ts = run(gaussian(g), cfg);
  REQUIRE(ts.status == RunStatus::completed);
  CHECK(ts.snapshots.size() == 11);
  const Conserved c0 = ts.log.front().e;
  for (const auto& row : ts.log) {
    CHECK(std::abs(row.e.e1 - c0.e1) / std::abs(c0.e1) < 1e-8);
    CHECK(std::abs(row.e.e2 - c0.e2) / std::abs(c0.e2) < 1e-8);
    CHECK(std::abs(row.e.e3 - c0.e3) / std::abs(c0.e3) < 1e-8);
  }
  // the local form of the equation holds on the computed solution
  const SolverState& s = ts.snapshots[5];
  CHECK(local_form_residual(s, dp_rhs(s.u())).sup_norm() < 1e-8);
  CHECK(momentum_transport_residual(s).sup_norm() < 1e-8);
}

TEST_CASE("stop threshold reports blow-up with a location") {
  const Grid g(30.0, 2048);
  const Field m0 = Field::sample(g, [](double x) { return -8.0 * x * std::exp(-x * x); });
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 1.0;
  cfg.stop.min_ux_floor = 5.0;
  const TimeSeries ts = run(green_convolution(m0), cfg);
  CHECK(ts.status == RunStatus::blow_up_detected);
  REQUIRE(ts.stop.has_value());
  CHECK(ts.stop->t < 1.0);
  CHECK(std::abs(ts.stop->location) < 0.5);
  REQUIRE(ts.last_valid.has_value());
  CHECK(deriv(ts.last_valid->u(), 1).min() < -5.0);
}

TEST_CASE("configuration errors") {
  const Grid g(30.0, 256);
  SolverConfig cfg;
  cfg.dt = -1.0;
  CHECK_THROWS_AS(run(gaussian(g), cfg), Error);
  cfg.dt = 0.01;
  cfg.t_end = 0.1;
  cfg.snapshot_stride = 3;
  CHECK_THROWS_AS(run(gaussian(g), cfg), Error);
  cfg.snapshot_stride = 1;
  const Field wide = Field::sample(Grid(5.0, 64), [](double x) { return std::exp(-0.1 * x * x); });
  CHECK_THROWS_AS(run(wide, cfg), Error);
}

TEST_CASE("Hermite series interpolant reproduces stored snapshots and their rates") {
  const Grid g(30.0, 512);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.2;
  cfg.snapshot_stride = 20;
  const TimeSeries ts = run(gaussian(g), cfg);
  const SeriesInterpolant si(ts);
  CHECK(sup_diff(si.u_at(ts.snapshots[3].t()), ts.snapshots[3].u()) < 1e-14);
  CHECK(sup_diff(backward(si.rate_at(ts.snapshots[4].t())), dp_rhs(ts.snapshots[4].u())) < 1e-12);
  // midpoint against an extra solver step
  const SolverState mid = step(step(ts.snapshots[2], 5e-3), 5e-3);
  CHECK(sup_diff(si.u_at(mid.t()), mid.u()) < 1e-6);
}
