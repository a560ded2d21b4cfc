#include "dpgeo/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "dpgeo/error.hpp"
#include "dpgeo/spectral.hpp"

namespace dpgeo {

using nlohmann::json;

void DatumSpec::validate() const {
  static const std::vector<std::string> kinds{"gaussian", "bump", "momentum_gaussian",
                                              "momentum_antisym", "zero"};
  if (std::find(kinds.begin(), kinds.end(), kind) == kinds.end())
    throw Error(ErrorKind::config_error, "unknown datum kind '" + kind + "'");
  if (!std::isfinite(A) || !std::isfinite(x0)) throw Error(ErrorKind::config_error, "datum parameters must be finite");
  if ((kind == "gaussian" || kind == "momentum_gaussian") && !(w > 0.0))
    throw Error(ErrorKind::config_error, "gaussian width must be positive");
  if (kind == "bump" && !(b > a)) throw Error(ErrorKind::config_error, "bump needs a < b");
}

namespace {

double gaussian(double A, double x0, double w, double x) {
  const double d = (x - x0) / w;
  return A * std::exp(-0.5 * d * d);
}

double bump(double A, double a, double b, double x) {
  const double s = (2.0 * x - a - b) / (b - a);
  if (std::abs(s) >= 1.0) return 0.0;
  return A * std::exp(1.0 - 1.0 / (1.0 - s * s));
}

}  // namespace

Field initial_momentum(const DatumSpec& spec, const Grid& grid) {
  spec.validate();
  if (spec.kind == "momentum_gaussian")
    return Field::sample(grid, [&](double x) { return gaussian(spec.A, spec.x0, spec.w, x); });
  if (spec.kind == "momentum_antisym")
    return Field::sample(grid, [&](double x) { return -spec.A * x * std::exp(-x * x); });
  return momentum(make_initial_datum(spec, grid));
}

Field make_initial_datum(const DatumSpec& spec, const Grid& grid) {
  spec.validate();
  Field u = Field::zeros(grid);
  if (spec.kind == "gaussian") {
    u = Field::sample(grid, [&](double x) { return gaussian(spec.A, spec.x0, spec.w, x); });
  } else if (spec.kind == "bump") {
    u = Field::sample(grid, [&](double x) { return bump(spec.A, spec.a, spec.b, x); });
  } else if (spec.kind == "momentum_gaussian" || spec.kind == "momentum_antisym") {
    const Field m0 = initial_momentum(spec, grid);
    check_edge_decay(m0, default_edge_tol, "initial momentum");
    u = green_convolution(m0);
  }
  check_edge_decay(u, default_edge_tol, "initial datum");
  return u;
}

const std::vector<std::string>& known_diagnostics() {
  static const std::vector<std::string> names{
      "conservation", "curvature", "structure", "offshell", "characteristics", "asymptotics",
      "blowup",       "appendix",  "global",    "integrability", "immersion"};
  return names;
}

void ScenarioConfig::validate() const {
  datum.validate();
  solver.validate();
  coframe.validate();
  (void)grid();
  for (const auto& d : diagnostics)
    if (std::find(known_diagnostics().begin(), known_diagnostics().end(), d) == known_diagnostics().end())
      throw Error(ErrorKind::config_error, "unknown diagnostic '" + d + "'");
  if (options.flow_seeds < 2 || !(options.flow_hi > options.flow_lo))
    throw Error(ErrorKind::config_error, "flow seeds need a nonempty range");
  for (double z : options.zetas)
    if (!(z != 0.0)) throw Error(ErrorKind::config_error, "zeta must be non-zero");
}

namespace {

template <class T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ScenarioConfig parse_config(const std::string& json_text) {
  ScenarioConfig cfg;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config_error, std::string("config is not valid JSON: ") + e.what());
  }
  try {
    read(j, "name", cfg.name);
    read(j, "output_dir", cfg.output_dir);
    if (j.contains("datum")) {
      const json& d = j.at("datum");
      read(d, "kind", cfg.datum.kind);
      read(d, "A", cfg.datum.A);
      read(d, "x0", cfg.datum.x0);
      read(d, "w", cfg.datum.w);
      read(d, "a", cfg.datum.a);
      read(d, "b", cfg.datum.b);
    }
    if (j.contains("grid")) {
      read(j.at("grid"), "L", cfg.L);
      read(j.at("grid"), "N", cfg.N);
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      read(s, "dt", cfg.solver.dt);
      read(s, "t_end", cfg.solver.t_end);
      read(s, "dealias", cfg.solver.dealias);
      read(s, "snapshot_stride", cfg.solver.snapshot_stride);
      read(s, "edge_tol", cfg.solver.edge_tol);
      if (s.contains("stop")) {
        const json& st = s.at("stop");
        read(st, "min_ux_floor", cfg.solver.stop.min_ux_floor);
        read(st, "sup_ceiling", cfg.solver.stop.sup_ceiling);
        if (st.contains("spectral_tail") && !st.at("spectral_tail").is_null())
          cfg.solver.stop.spectral_tail = st.at("spectral_tail").get<double>();
      }
    }
    if (j.contains("coframe")) {
      read(j.at("coframe"), "mu", cfg.coframe.mu);
      read(j.at("coframe"), "sign", cfg.coframe.sign);
    }
    read(j, "diagnostics", cfg.diagnostics);
    if (j.contains("options")) {
      const json& o = j.at("options");
      auto& p = cfg.options;
      read(o, "mask_tol", p.mask_tol);
      read(o, "mu_sweep", p.mu_sweep);
      read(o, "random_fields", p.random_fields);
      read(o, "seed", p.seed);
      read(o, "flow_lo", p.flow_lo);
      read(o, "flow_hi", p.flow_hi);
      read(o, "flow_seeds", p.flow_seeds);
      read(o, "support_a", p.support_a);
      read(o, "support_b", p.support_b);
      read(o, "blowup_x0", p.blowup_x0);
      read(o, "blowup_threshold", p.blowup_threshold);
      read(o, "appendix_points", p.appendix_points);
      read(o, "zetas", p.zetas);
      if (o.contains("immersion_cases")) {
        p.immersion_cases.clear();
        for (const auto& c : o.at("immersion_cases"))
          p.immersion_cases.push_back({c.at("sigma").get<double>(), c.at("b0").get<double>()});
      }
      read(o, "immersion_mu", p.immersion_mu);
      read(o, "immersion_b0", p.immersion_b0);
      read(o, "immersion_x_begin", p.immersion_x_begin);
      read(o, "immersion_x_end", p.immersion_x_end);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::config_error, std::string("bad config field: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_error, "cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const ScenarioConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  j["datum"] = {{"kind", cfg.datum.kind}, {"A", cfg.datum.A}, {"x0", cfg.datum.x0},
                {"w", cfg.datum.w},       {"a", cfg.datum.a}, {"b", cfg.datum.b}};
  j["grid"] = {{"L", cfg.L}, {"N", cfg.N}};
  json stop = {{"min_ux_floor", cfg.solver.stop.min_ux_floor},
               {"sup_ceiling", cfg.solver.stop.sup_ceiling}};
  stop["spectral_tail"] = std::isfinite(cfg.solver.stop.spectral_tail)
                              ? json(cfg.solver.stop.spectral_tail)
                              : json(nullptr);
  j["solver"] = {{"dt", cfg.solver.dt},
                 {"t_end", cfg.solver.t_end},
                 {"dealias", cfg.solver.dealias},
                 {"snapshot_stride", cfg.solver.snapshot_stride},
                 {"edge_tol", cfg.solver.edge_tol},
                 {"stop", stop}};
  j["coframe"] = {{"mu", cfg.coframe.mu}, {"sign", cfg.coframe.sign}};
  j["diagnostics"] = cfg.diagnostics;
  const auto& p = cfg.options;
  json cases = json::array();
  for (const auto& c : p.immersion_cases) cases.push_back({{"sigma", c.sigma}, {"b0", c.b0}});
  j["options"] = {{"mask_tol", p.mask_tol},
                  {"mu_sweep", p.mu_sweep},
                  {"random_fields", p.random_fields},
                  {"seed", p.seed},
                  {"flow_lo", p.flow_lo},
                  {"flow_hi", p.flow_hi},
                  {"flow_seeds", p.flow_seeds},
                  {"support_a", p.support_a},
                  {"support_b", p.support_b},
                  {"blowup_x0", p.blowup_x0},
                  {"blowup_threshold", p.blowup_threshold},
                  {"appendix_points", p.appendix_points},
                  {"zetas", p.zetas},
                  {"immersion_cases", cases},
                  {"immersion_mu", p.immersion_mu},
                  {"immersion_b0", p.immersion_b0},
                  {"immersion_x_begin", p.immersion_x_begin},
                  {"immersion_x_end", p.immersion_x_end}};
  j["output_dir"] = cfg.output_dir;
  return j.dump(2) + "\n";
}

const std::vector<std::string>& canned_scenario_names() {
  static const std::vector<std::string> names{"curvature-gaussian", "compact-bump-asymptotics",
                                              "blowup-canonical",   "global-one-signed",
                                              "integrability-suite", "immersion-suite"};
  return names;
}

ScenarioConfig canned_scenario(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  const std::vector<double> sweep{-1.0, 0.0, 0.5, 2.0};
  if (name == "curvature-gaussian") {
    c.L = 30.0;
    c.N = 4096;
    c.solver.dt = 1e-3;
    c.solver.t_end = 1.0;
    c.solver.snapshot_stride = 10;
    c.options.mu_sweep = sweep;
    c.diagnostics = {"conservation", "curvature", "structure", "offshell", "characteristics"};
  } else if (name == "compact-bump-asymptotics") {
    // A wide support keeps the bump's spectral tail below the exterior tolerances.
    c.datum = {"bump", 1.0, 0.0, 1.0, -10.0, 10.0};
    c.options.support_a = -10.0;
    c.options.support_b = 10.0;
    c.L = 40.0;
    c.N = 2048;
    c.solver.dt = 1e-3;
    c.solver.t_end = 0.5;
    c.solver.snapshot_stride = 10;
    c.coframe = {0.5, 1};
    c.diagnostics = {"conservation", "asymptotics"};
  } else if (name == "blowup-canonical") {
    c.datum = {"momentum_antisym", 8.0, 0.0, 1.0, -1.0, 1.0};
    c.L = 30.0;
    c.N = 16384;
    c.solver.dt = 2.5e-5;
    c.solver.t_end = 0.5;
    c.solver.snapshot_stride = 40;
    c.solver.stop.spectral_tail = 1e-6;
    c.diagnostics = {"blowup", "appendix"};
  } else if (name == "global-one-signed") {
    c.datum = {"momentum_gaussian", 0.5, 0.0, std::sqrt(0.5), -1.0, 1.0};
    c.L = 40.0;
    c.N = 16384;
    c.solver.dt = 1e-3;
    c.solver.t_end = 10.0;
    c.solver.snapshot_stride = 100;
    c.diagnostics = {"global", "conservation"};
  } else if (name == "integrability-suite") {
    c.L = 30.0;
    c.N = 2048;
    c.solver.dt = 5e-4;
    c.solver.t_end = 1.0;
    c.solver.snapshot_stride = 20;
    c.options.mu_sweep = sweep;
    c.diagnostics = {"integrability"};
  } else if (name == "immersion-suite") {
    c.L = 30.0;
    c.N = 1024;
    c.solver.dt = 1e-3;
    c.solver.t_end = 0.2;
    c.solver.snapshot_stride = 50;
    c.diagnostics = {"immersion"};
  } else {
    throw Error(ErrorKind::config_error, "unknown scenario '" + name + "'");
  }
  c.validate();
  return c;
}

std::size_t VerificationReport::failures() const {
  return static_cast<std::size_t>(std::count_if(
      checks.begin(), checks.end(), [](const CheckResult& c) { return !c.informational && !c.passed; }));
}

const CheckResult* VerificationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

std::vector<const CheckResult*> VerificationReport::with_prefix(const std::string& prefix) const {
  std::vector<const CheckResult*> out;
  for (const auto& c : checks)
    if (c.name.rfind(prefix, 0) == 0) out.push_back(&c);
  return out;
}

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf")); }

}  // namespace

std::string report_to_json(const VerificationReport& report) {
  json checks = json::array();
  for (const auto& c : report.checks) {
    json params = json::object();
    for (const auto& [k, v] : c.parameters) params[k] = number(v);
    checks.push_back({{"name", c.name},
                      {"max_residual", number(c.max_residual)},
                      {"tolerance", number(c.tolerance)},
                      {"passed", c.passed},
                      {"informational", c.informational},
                      {"verdict", c.verdict},
                      {"parameters", params}});
  }
  json j = {{"scenario", report.scenario}, {"failures", report.failures()}, {"checks", checks}};
  return j.dump(2) + "\n";
}

}  // namespace dpgeo
