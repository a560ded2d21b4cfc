// dpgeo command line: runs scenarios and writes CSV/JSON artifacts.
#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "dpgeo/error.hpp"
#include "dpgeo/scenario.hpp"

namespace {

struct Common {
  std::string config;
  std::string seed;
  std::string out;
  std::optional<double> mu;
  std::optional<int> sign;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "scenario JSON file");
  cmd->add_option("--seed-scenario", c.seed, "start from a canned scenario")
      ->check(CLI::IsMember(dpgeo::canned_scenario_names()));
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--mu", c.mu, "coframe parameter mu (disables the mu sweep)");
  cmd->add_option("--sign", c.sign, "coframe sign")->check(CLI::IsMember({-1, 1}));
  cmd->add_flag("-q,--quiet", c.quiet, "only print failures");
}

dpgeo::ScenarioConfig resolve(const Common& c, const std::string& fallback) {
  dpgeo::ScenarioConfig cfg;
  if (!c.config.empty())
    cfg = dpgeo::load_config(c.config);
  else
    cfg = dpgeo::canned_scenario(c.seed.empty() ? fallback : c.seed);
  if (c.mu) {
    cfg.coframe.mu = *c.mu;
    cfg.options.mu_sweep.clear();
  }
  if (c.sign) {
    cfg.coframe.sign = *c.sign;
    cfg.options.mu_sweep.clear();
  }
  if (!c.out.empty()) cfg.output_dir = c.out;
  cfg.validate();
  return cfg;
}

std::size_t print_report(const dpgeo::VerificationReport& r, bool quiet) {
  for (const auto& c : r.checks) {
    const char* tag = c.informational ? "INFO" : (c.passed ? "PASS" : "FAIL");
    if (quiet && (c.informational || c.passed)) continue;
    fmt::print("{} {:<52} {:<12.4e} tol {:<9.2e} {}\n", tag, c.name, c.max_residual, c.tolerance, c.verdict);
  }
  fmt::print("{}: {} checks, {} failed\n", r.scenario, r.checks.size(), r.failures());
  return r.failures();
}

std::size_t run_with(const Common& c, const std::string& fallback, std::vector<std::string> diagnostics) {
  dpgeo::ScenarioConfig cfg = resolve(c, fallback);
  if (!diagnostics.empty()) cfg.diagnostics = std::move(diagnostics);
  return print_report(dpgeo::run_scenario(cfg), c.quiet);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degasperis-Procesi solver and geometric verification harness", "dpgeo"};
  app.require_subcommand(1);
  std::string level = "warn";
  app.add_option("--log-level", level, "trace, debug, info, warn, error, off");

  Common common;
  std::map<std::string, CLI::App*> cmds;
  const std::vector<std::pair<std::string, std::string>> specs{
      {"solve", "integrate the equation and write per-snapshot diagnostics"},
      {"geometry", "curvature and structure equations of the coframe"},
      {"flow", "characteristic flow and support curves"},
      {"blowup", "blow-up certificate and appendix inequalities"},
      {"immersion", "second fundamental form and Bonnet residuals"},
      {"integrability", "pseudo-potentials, conservation law, ZCR and gauge checks"},
      {"verify-all", "run a scenario with its configured checks, or every canned scenario"},
      {"converge", "temporal and spatial refinement study"}};
  for (const auto& [name, help] : specs) {
    cmds[name] = app.add_subcommand(name, help);
    add_common(cmds[name], common);
  }

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(level));

  std::size_t failures = 0;
  try {
    if (*cmds["solve"]) {
      failures = run_with(common, "curvature-gaussian", {"conservation"});
    } else if (*cmds["geometry"]) {
      failures = run_with(common, "curvature-gaussian", {"curvature", "structure"});
    } else if (*cmds["flow"]) {
      dpgeo::ScenarioConfig cfg = resolve(common, "compact-bump-asymptotics");
      cfg.diagnostics = {"characteristics"};
      if (cfg.datum.kind == "bump") cfg.diagnostics.push_back("asymptotics");
      failures = print_report(dpgeo::run_scenario(cfg), common.quiet);
    } else if (*cmds["blowup"]) {
      failures = run_with(common, "blowup-canonical", {"blowup", "appendix"});
    } else if (*cmds["immersion"]) {
      failures = run_with(common, "immersion-suite", {"immersion"});
    } else if (*cmds["integrability"]) {
      failures = run_with(common, "integrability-suite", {"integrability"});
    } else if (*cmds["verify-all"]) {
      if (!common.config.empty() || !common.seed.empty()) {
        failures = run_with(common, "", {});
      } else {
        for (const auto& name : dpgeo::canned_scenario_names()) {
          Common one = common;
          one.seed = name;
          if (!common.out.empty()) one.out = (std::filesystem::path(common.out) / name).string();
          failures += run_with(one, name, {});
        }
      }
    } else if (*cmds["converge"]) {
      const dpgeo::ScenarioConfig cfg = resolve(common, "curvature-gaussian");
      const dpgeo::ConvergenceTable t = dpgeo::convergence_study(cfg);
      const std::string csv = dpgeo::convergence_to_csv(t);
      std::cout << csv;
      fmt::print("temporal order {:.4f}, spatial error at N=1024 {:.3e} ({})\n", t.temporal_order,
                 t.floor_error, t.floor_reached ? "at floor" : "above floor");
      if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        std::ofstream(std::filesystem::path(cfg.output_dir) / "convergence.csv") << csv;
      }
      failures = (t.temporal_order >= 3.7 && t.temporal_order <= 4.3 ? 0 : 1) + (t.floor_reached ? 0 : 1);
    }
  } catch (const dpgeo::Error& e) {
    fmt::print(stderr, "error [{}]: {}\n", dpgeo::to_string(e.kind()), e.what());
    return 255;
  }
  return static_cast<int>(std::min<std::size_t>(failures, 254));
}
