#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpgeo/dp_solver.hpp"
#include "dpgeo/geometry.hpp"
#include "dpgeo/immersion.hpp"

namespace dpgeo {

// gaussian:          u0 = A exp(-(x - x0)^2 / (2 w^2))
// bump:              u0 = A exp(1 - 1/(1 - s^2)) for |s| < 1, s = (2x - a - b)/(b - a), else 0
// momentum_gaussian: m0 = A exp(-(x - x0)^2 / (2 w^2)), u0 = G * m0
// momentum_antisym:  m0 = -A x exp(-x^2), u0 = G * m0
// zero:              u0 = 0
struct DatumSpec {
  std::string kind = "gaussian";
  double A = 1.0;
  double x0 = 0.0;
  double w = 1.0;
  double a = -1.0;
  double b = 1.0;

  void validate() const;
};

Field make_initial_datum(const DatumSpec& spec, const Grid& grid);
// m0 for the momentum kinds, (1 - d^2) u0 otherwise.
Field initial_momentum(const DatumSpec& spec, const Grid& grid);

struct ImmersionCase {
  double sigma = 3.0;
  double b0 = 1.0;
};

struct ScenarioOptions {
  double mask_tol = default_mask_tol;
  // curvature / structure
  std::vector<double> mu_sweep;  // empty: the configured coframe only
  std::size_t random_fields = 100;
  std::uint64_t seed = 20240611;
  // characteristics
  double flow_lo = -6.0;
  double flow_hi = 6.0;
  std::size_t flow_seeds = 121;
  // compact support
  double support_a = -1.0;
  double support_b = 1.0;
  // blow-up
  double blowup_x0 = 0.0;
  double blowup_threshold = 1e6;
  std::size_t appendix_points = 20;
  // integrability
  std::vector<double> zetas{0.5, 1.0, 2.0};
  // immersion
  std::vector<ImmersionCase> immersion_cases{{3.0, 1.0}, {5.0, 0.5}};
  double immersion_mu = 0.5;
  double immersion_b0 = 1.0;
  double immersion_x_begin = 0.05;
  double immersion_x_end = 1.5;
};

struct ScenarioConfig {
  std::string name = "custom";
  DatumSpec datum;
  double L = 30.0;
  std::size_t N = 1024;
  SolverConfig solver;
  CoframeParams coframe;
  std::vector<std::string> diagnostics;
  ScenarioOptions options;
  std::string output_dir;

  void validate() const;
  Grid grid() const { return Grid(L, N); }
};

const std::vector<std::string>& known_diagnostics();

ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
std::string config_to_json(const ScenarioConfig& cfg);

const std::vector<std::string>& canned_scenario_names();
ScenarioConfig canned_scenario(const std::string& name);

struct CheckResult {
  std::string name;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
  bool informational = false;  // reported, never counted as a failure
  std::string verdict;
  std::vector<std::pair<std::string, double>> parameters;
};

struct VerificationReport {
  std::string scenario;
  std::vector<CheckResult> checks;
  std::vector<std::pair<std::string, double>> timings;  // seconds, kept out of the JSON report

  std::size_t failures() const;
  const CheckResult* find(const std::string& name) const;
  std::vector<const CheckResult*> with_prefix(const std::string& prefix) const;
};

std::string report_to_json(const VerificationReport& report);

// Runs the solver and the enabled diagnostics; writes CSV/JSON files when
// cfg.output_dir is set.
VerificationReport run_scenario(const ScenarioConfig& cfg);

struct ConvergenceRow {
  std::string sweep;  // "temporal" or "spatial"
  std::size_t N = 0;
  double dt = 0.0;
  double error = 0.0;
};

struct ConvergenceOptions {
  std::size_t temporal_N = 512;
  double dt_coarse = 0.05;
  std::size_t temporal_levels = 4;
  std::vector<std::size_t> spatial_N{128, 256, 512, 1024, 2048};
  double spatial_dt = 1e-3;
  double t_end = 0.5;
  double floor_tol = 1e-10;  // sup error counted as round-off level
  std::size_t floor_N = 1024;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double temporal_order = 0.0;
  double floor_error = 0.0;  // spatial error at floor_N
  bool floor_reached = false;
};

ConvergenceTable convergence_study(const ScenarioConfig& base, const ConvergenceOptions& opt = {});
std::string convergence_to_csv(const ConvergenceTable& table);

}  // namespace dpgeo
