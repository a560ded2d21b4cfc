// Acceptance suite: one line per criterion, built from the canned scenarios.
//
// Exit status is 0 when every scenario ran to completion (criteria may still
// print FAIL); --strict returns the number of failing criteria instead.

#include <CLI11.hpp>
#include <fmt/core.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "dpgeo/scenario.hpp"

using namespace dpgeo;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool passed = true;
  std::string detail;
};

class Criterion {
 public:
  explicit Criterion(int id) : id_(id) {}

  // Every non-informational check with this prefix must pass.
  void require_prefix(const VerificationReport& r, const std::string& prefix) {
    const auto found = r.with_prefix(prefix);
    if (found.empty()) fail(prefix + "* missing");
    for (const CheckResult* c : found)
      if (!c->informational) take(*c);
  }

  void require(const VerificationReport& r, const std::string& name) {
    const CheckResult* c = r.find(name);
    if (!c) return fail(name + " missing");
    take(*c);
  }

  void require_value(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }

  void fail(const std::string& what) {
    v_.passed = false;
    if (failures_++ < 3) v_.detail += (v_.detail.empty() ? "" : "; ") + what;
  }

  void note(const std::string& what) { notes_.push_back(what); }

  bool print(const std::string& title, std::string& log) const {
    std::string tail = v_.detail;
    if (failures_ > 3) tail += fmt::format(" (+{} more)", failures_ - 3);
    if (v_.passed) {
      tail.clear();
      for (const auto& n : notes_) tail += (tail.empty() ? "" : ", ") + n;
    }
    const std::string line = fmt::format("criterion {:>2} {:<22} {}{}{}\n", id_, title, v_.passed ? "PASS" : "FAIL",
                                         tail.empty() ? "" : "  ", tail);
    fmt::print("{}", line);
    log += line;
    return v_.passed;
  }

 private:
  void take(const CheckResult& c) {
    if (!c.passed) fail(fmt::format("{} = {:.3g} (tol {:.1g})", c.name, c.max_residual, c.tolerance));
  }

  int id_;
  Verdict v_;
  int failures_ = 0;
  std::vector<std::string> notes_;
};

double timing(const VerificationReport& r, const std::string& key) {
  for (const auto& [k, v] : r.timings)
    if (k == key) return v;
  return 0.0;
}

VerificationReport run_named(ScenarioConfig cfg, const fs::path& out, const std::string& dir) {
  cfg.output_dir = (out / dir).string();
  spdlog::info("running {}", dir);
  return run_scenario(cfg);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  os << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::string out = "acceptance";
  bool strict = false;
  std::string level = "warn";
  app.add_option("--out", out, "output directory");
  app.add_flag("--strict", strict, "exit with the number of failing criteria");
  app.add_option("--log-level", level, "spdlog level");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(level));
  const fs::path root(out);

  try {
    // 1-3: the gaussian at the stated resolution.
    ScenarioConfig g1 = canned_scenario("curvature-gaussian");
    g1.N = 1024;
    g1.diagnostics = {"conservation", "curvature", "structure", "offshell"};
    const VerificationReport rg = run_named(g1, root, "gaussian-n1024");

    // 4: characteristics on the canned gaussian run.
    ScenarioConfig g4 = canned_scenario("curvature-gaussian");
    g4.diagnostics = {"characteristics"};
    const VerificationReport rc = run_named(g4, root, "gaussian-characteristics");

    const VerificationReport rb = run_named(canned_scenario("compact-bump-asymptotics"), root, "compact-bump");

    const auto b0 = std::chrono::steady_clock::now();
    const VerificationReport ru = run_named(canned_scenario("blowup-canonical"), root, "blowup");
    const double blowup_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - b0).count();

    const VerificationReport rgl = run_named(canned_scenario("global-one-signed"), root, "global");
    const VerificationReport ri = run_named(canned_scenario("integrability-suite"), root, "integrability");
    const VerificationReport rim = run_named(canned_scenario("immersion-suite"), root, "immersion");

    spdlog::info("running convergence study");
    const ConvergenceTable conv = convergence_study(canned_scenario("curvature-gaussian"));
    fs::create_directories(root / "convergence");
    write_file(root / "convergence" / "convergence.csv", convergence_to_csv(conv));

    int failed = 0;
    std::string summary;
    auto done = [&](const Criterion& c, const char* title) { failed += !c.print(title, summary); };

    {
      Criterion c(1);
      c.require_prefix(rg, "curvature.");
      const double solve = timing(rg, "solver");
      double worst = 0.0;
      for (const auto& [k, v] : rg.timings)
        if (k.rfind("curvature.", 0) == 0) worst = std::max(worst, solve + v);
      c.require_value(worst < 120.0, fmt::format("runtime {:.1f}s per combo", worst));
      c.note(fmt::format("max runtime {:.2f}s per combo", worst));
      done(c, "curvature");
    }
    {
      Criterion c(2);
      c.require_prefix(rg, "structure.mu");
      c.require_prefix(rg, "offshell.R2.");
      c.require_prefix(rg, "offshell.R1+R3.");
      c.require_prefix(rg, "offshell.wedge_identity.");
      done(c, "structure equations");
    }
    {
      Criterion c(3);
      for (const char* e : {"conservation.E1", "conservation.E2", "conservation.E3"}) c.require(rg, e);
      done(c, "conservation");
    }
    {
      Criterion c(4);
      for (const char* n : {"characteristics.invariant", "characteristics.qx_dual_path", "characteristics.monotone"})
        c.require(rc, n);
      done(c, "characteristics");
    }
    {
      Criterion c(5);
      c.require(rb, "asymptotics.left");
      c.require(rb, "asymptotics.right");
      done(c, "compact support");
    }
    {
      Criterion c(6);
      for (const char* n : {"blowup.sign_conditions", "blowup.I_decreasing_negative", "blowup.g_nondecreasing",
                            "blowup.bound", "blowup.threshold_cross_before_T0"})
        c.require(ru, n);
      c.require_value(blowup_seconds < 300.0, fmt::format("runtime {:.0f}s", blowup_seconds));
      c.note(fmt::format("runtime {:.0f}s", blowup_seconds));
      done(c, "blow-up");
    }
    {
      Criterion c(7);
      for (const char* n : {"global.ux_bound", "global.no_stop", "global.sign_preserved"}) c.require(rgl, n);
      done(c, "global bound");
    }
    {
      Criterion c(8);
      c.require_prefix(ri, "integrability.");
      done(c, "integrability algebra");
    }
    {
      Criterion c(9);
      c.require_prefix(rim, "immersion.");
      done(c, "immersion");
    }
    {
      Criterion c(10);
      c.require_value(conv.temporal_order >= 3.7 && conv.temporal_order <= 4.3,
                      fmt::format("temporal order {:.3f}", conv.temporal_order));
      c.require_value(conv.floor_reached, fmt::format("spatial error {:.2e} at the floor resolution", conv.floor_error));
      c.require(ru, "appendix.inequality1");
      c.require(ru, "appendix.inequality2");
      c.note(fmt::format("order {:.3f}, floor error {:.1e}", conv.temporal_order, conv.floor_error));
      done(c, "convergence");
    }
    summary += fmt::format("{} of 10 criteria failed\n", failed);
    fmt::print("{} of 10 criteria failed\n", failed);
    write_file(root / "summary.txt", summary);
    return strict ? failed : 0;
  } catch (const std::exception& e) {
    fmt::print(stderr, "acceptance aborted: {}\n", e.what());
    return 255;
  }
}
