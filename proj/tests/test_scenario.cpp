#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <json.hpp>

#include "dpgeo/scenario.hpp"

using namespace dpgeo;
namespace fs = std::filesystem;

TEST_CASE("datum kinds") {
  const Grid g(40.0, 2048);
  DatumSpec d;
  d.kind = "gaussian";
  d.A = 2.0;
  d.x0 = 1.0;
  d.w = 0.5;
  const Field gu = make_initial_datum(d, g);
  CHECK(interpolate(gu, 1.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(interpolate(gu, 1.5) == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-12));

  d = {};
  d.kind = "bump";
  d.a = -3.0;
  d.b = 5.0;
  const Field b = make_initial_datum(d, g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i);
    const double t = (x - 1.0) / 4.0;
    if (x <= -3.0 || x >= 5.0)
      CHECK(b[i] == 0.0);
    else
      CHECK(b[i] == doctest::Approx(std::exp(1.0 - 1.0 / (1.0 - t * t))).epsilon(1e-14));
  }

  d = {};
  d.kind = "momentum_antisym";
  d.A = 8.0;
  const Field m0 = initial_momentum(d, g);
  CHECK(interpolate(m0, 0.5) == doctest::Approx(-4.0 * std::exp(-0.25)).epsilon(1e-10));
  // u0 = G * m0 inverts (1 - d^2)
  CHECK((momentum(make_initial_datum(d, g)) - m0).sup_norm() < 1e-8);

  d.kind = "zero";
  CHECK(make_initial_datum(d, g).sup_norm() == 0.0);

  d.kind = "triangle";
  CHECK_THROWS_AS(d.validate(), Error);
  d.kind = "bump";
  d.a = 1.0;
  d.b = 0.0;
  CHECK_THROWS_AS(d.validate(), Error);
}

TEST_CASE("config json round trip") {
  for (const auto& name : canned_scenario_names()) {
    const ScenarioConfig c = canned_scenario(name);
    CHECK_NOTHROW(c.validate());
    const ScenarioConfig back = parse_config(config_to_json(c));
    CHECK(back.name == c.name);
    CHECK(back.N == c.N);
    CHECK(back.L == c.L);
    CHECK(back.solver.dt == c.solver.dt);
    CHECK(back.solver.t_end == c.solver.t_end);
    CHECK(back.datum.kind == c.datum.kind);
    CHECK(back.diagnostics == c.diagnostics);
    CHECK(back.options.mu_sweep == c.options.mu_sweep);
    CHECK(config_to_json(back) == config_to_json(c));
  }
  CHECK(canned_scenario_names().size() == 6);
  CHECK_THROWS_AS(canned_scenario("nope"), Error);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("{"), Error);
  CHECK_THROWS_AS(parse_config(R"({"diagnostics": ["telepathy"]})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"solver": {"dt": 0}})"), Error);
  CHECK_THROWS_AS(parse_config(R"({"coframe": {"sign": 2}})"), Error);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
  const ScenarioConfig c = parse_config(R"({"grid": {"L": 20, "N": 256}, "coframe": {"mu": 0.5, "sign": -1}})");
  CHECK(c.L == 20.0);
  CHECK(c.N == 256);
  CHECK(c.coframe.mu == 0.5);
  CHECK(c.coframe.sign == -1);
}

TEST_CASE("run_scenario writes a report") {
  const fs::path dir = fs::temp_directory_path() / "dpgeo_test_scenario";
  fs::remove_all(dir);
  ScenarioConfig c;
  c.name = "small";
  c.L = 30.0;
  c.N = 512;
  c.solver.dt = 1e-3;
  c.solver.t_end = 0.1;
  c.solver.snapshot_stride = 20;
  c.diagnostics = {"conservation", "curvature", "structure"};
  c.output_dir = dir.string();
  const VerificationReport r = run_scenario(c);
  CHECK(r.failures() == 0);
  REQUIRE(r.find("conservation.E1") != nullptr);
  CHECK(r.find("conservation.E1")->passed);
  CHECK(!r.with_prefix("curvature.").empty());
  CHECK(r.find("missing") == nullptr);
  for (const char* f : {"config.json", "report.json", "snapshots.csv"}) CHECK(fs::exists(dir / f));
  const auto j = nlohmann::json::parse(report_to_json(r));
  CHECK(j["scenario"] == "small");
  CHECK(j["checks"].size() == r.checks.size());
  fs::remove_all(dir);
}

TEST_CASE("convergence table") {
  ScenarioConfig base = canned_scenario("curvature-gaussian");
  ConvergenceOptions o;
  o.temporal_N = 256;
  o.temporal_levels = 3;
  o.spatial_N = {128, 256, 512};
  o.floor_N = 256;
  o.t_end = 0.2;
  o.dt_coarse = 0.05;
  const ConvergenceTable t = convergence_study(base, o);
  CHECK(t.rows.size() == 5);  // the finest spatial level is the reference
  CHECK(t.temporal_order > 3.5);
  CHECK(t.temporal_order < 4.5);
  const std::string csv = convergence_to_csv(t);
  CHECK(csv.rfind("sweep,N,dt,error", 0) == 0);
}
