#include <doctest.h>

#include <cmath>
#include <random>

#include "dpgeo/geometry.hpp"

using namespace dpgeo;

namespace {

Field gaussian(const Grid& g) {
  return Field::sample(g, [](double x) { return std::exp(-0.5 * x * x); });
}

// Smooth decaying field with a few random Gaussian bumps.
Field random_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(-1.0, 1.0), pos(-5.0, 5.0), wid(0.7, 2.0);
  std::vector<double> v(g.size(), 0.0);
  for (int b = 0; b < 4; ++b) {
    const double A = amp(rng), c = pos(rng), w = wid(rng);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = (g.node(i) - c) / w;
      v[i] += A * std::exp(-0.5 * s * s);
    }
  }
  return Field(g, v);
}

const std::vector<CoframeParams> sweep() {
  std::vector<CoframeParams> out;
  for (double mu : {-1.0, 0.0, 0.5, 2.0})
    for (int s : {1, -1}) out.push_back({mu, s});
  return out;
}

}  // namespace

TEST_CASE("coframe and metric entries") {
  const Grid g(30.0, 512);
  const SolverState st(0.0, gaussian(g));
  const Field u = st.u(), ux = deriv(u, 1), uxx = deriv(u, 2);
  for (const auto& p : sweep()) {
    const CoframeField cf = coframe(st, p);
    const double r = std::sqrt(1.0 + p.mu * p.mu);
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double m = st.m()[i];
      const double F = ux[i] * ux[i] - 2.0 * u[i] * ux[i] + u[i] * uxx[i];
      e = std::max({e, std::abs(cf.f11()[i] - m), std::abs(cf.f12()[i] - F),
                    std::abs(cf.f21()[i] - (p.mu * m + p.sign * 2.0 * r)), std::abs(cf.f22()[i] - p.mu * F),
                    std::abs(cf.f31()[i] - (p.sign * r * m + 2.0 * p.mu)), std::abs(cf.f32()[i] - p.sign * r * F)});
    }
    CHECK(e < 1e-12);
    const MetricField mf = metric(cf);
    double em = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      em = std::max(em, std::abs(mf.g11[i] - (cf.f11()[i] * cf.f11()[i] + cf.f21()[i] * cf.f21()[i])));
      em = std::max(em, std::abs(mf.g12[i] - (cf.f11()[i] * cf.f12()[i] + cf.f21()[i] * cf.f22()[i])));
      em = std::max(em, std::abs(mf.g22[i] - (cf.f12()[i] * cf.f12()[i] + cf.f22()[i] * cf.f22()[i])));
    }
    CHECK(em < 1e-14);
    CHECK(wedge_identity_residual(cf).sup_norm() < 1e-13);
  }
}

TEST_CASE("coframe params") {
  CHECK_THROWS_AS((CoframeParams{0.0, 0}.validate()), Error);
  CHECK_THROWS_AS((CoframeParams{NAN, 1}.validate()), Error);
  CHECK(CoframeParams{2.0, 1}.root() == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("zero datum is degenerate") {
  const Grid g(10.0, 128);
  const SolverState st(0.0, Field::zeros(g));
  const CoframeField cf = coframe(st, {});
  CHECK_THROWS_AS(gauss_curvature(st, cf), Error);
  CHECK(pss_region(cf).empty());
}

TEST_CASE("curvature is -1 and structure equations hold on a solution") {
  const Grid g(30.0, 1024);
  SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.t_end = 0.3;
  cfg.snapshot_stride = 100;
  const TimeSeries ts = run(gaussian(g), cfg);
  for (const auto& st : ts.snapshots) {
    const SolutionJet jet = make_jet(st);
    for (const auto& p : sweep()) {
      const CoframeField cf = coframe(jet, p);
      const CurvatureField K = gauss_curvature(jet, cf);
      CHECK(K.unmasked_count > 0);
      CHECK(K.sup_deviation < 1e-6);
      CHECK(structure_residuals(jet, cf).sup() < 1e-6);
    }
  }
}

TEST_CASE("off-shell structure residuals are multiples of the equation residual") {
  const Grid g(30.0, 512);
  std::mt19937_64 rng(7);
  for (int n = 0; n < 5; ++n) {
    const SolverState st(0.0, random_field(g, rng));
    const Field ut = random_field(g, rng);
    const SolutionJet jet = make_jet(st, ut);
    const Field P = local_form_residual(st, ut);
    const double scale = std::max(1.0, P.sup_norm());
    for (const auto& p : sweep()) {
      const CoframeField cf = coframe(jet, p);
      const StructureResiduals r = structure_residuals(jet, cf);
      CHECK((r.r1 + P).sup_norm() / scale < 1e-10);
      CHECK((r.r2 + p.mu * P).sup_norm() / scale < 1e-10);
      CHECK((r.r3 + p.sign * p.root() * P).sup_norm() / scale < 1e-10);
      if (p.mu == 0.0 && p.sign == -1) {
        CHECK(r.r2.sup_norm() < 1e-12);
        CHECK((r.r1 + r.r3).sup_norm() / scale < 1e-12);
      }
    }
  }
}

TEST_CASE("pss region follows F") {
  const Grid g(30.0, 512);
  const SolverState st(0.0, gaussian(g));
  const CoframeField cf = coframe(st, {});
  const auto runs = pss_region(cf);
  REQUIRE(!runs.empty());
  const double cut = 1e-3 * cf.f12().sup_norm();
  for (const auto& r : runs) {
    CHECK(r.first <= r.last);
    for (std::size_t i = r.first; i <= r.last; ++i) CHECK(std::abs(cf.f12()[i]) > cut);
  }
}
