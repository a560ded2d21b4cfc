#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <limits>
#include <numeric>
#include <random>

#include "dpgeo/blowup.hpp"
#include "dpgeo/characteristics.hpp"
#include "dpgeo/error.hpp"
#include "dpgeo/geometry.hpp"
#include "dpgeo/immersion.hpp"
#include "dpgeo/integrability.hpp"
#include "dpgeo/quadrature.hpp"
#include "dpgeo/scenario.hpp"
#include "dpgeo/spectral.hpp"

namespace dpgeo {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using Params = std::vector<std::pair<std::string, double>>;

constexpr double inf = std::numeric_limits<double>::infinity();

CheckResult check(std::string name, double residual, double tol, Params params = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.max_residual = residual;
  c.tolerance = tol;
  c.passed = std::isfinite(residual) && residual <= tol;
  c.verdict = c.passed ? "pass" : "fail";
  c.parameters = std::move(params);
  return c;
}

CheckResult info(std::string name, double value, std::string verdict, Params params = {}) {
  CheckResult c;
  c.name = std::move(name);
  c.max_residual = value;
  c.tolerance = inf;
  c.passed = true;
  c.informational = true;
  c.verdict = std::move(verdict);
  c.parameters = std::move(params);
  return c;
}

std::string cell(double v) { return std::isfinite(v) ? fmt::format("{:.17g}", v) : std::string(); }

class Csv {
 public:
  Csv(const std::string& dir, const std::string& file, const std::vector<std::string>& header) {
    if (dir.empty()) return;
    out_.open(fs::path(dir) / file);
    if (!out_) throw Error(ErrorKind::io_error, "cannot write " + file);
    for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
    out_ << '\n';
  }
  void row(const std::vector<double>& values) {
    if (!out_.is_open()) return;
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << cell(values[i]);
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void write_text(const std::string& dir, const std::string& file, const std::string& text) {
  if (dir.empty()) return;
  std::ofstream out(fs::path(dir) / file);
  if (!out) throw Error(ErrorKind::io_error, "cannot write " + file);
  out << text;
}

std::string combo_tag(double mu, int sign) { return fmt::format("mu={:g},sign={:+d}", mu, sign); }

std::vector<CoframeParams> combos(const ScenarioConfig& cfg) {
  if (cfg.options.mu_sweep.empty()) return {cfg.coframe};
  std::vector<CoframeParams> out;
  for (double mu : cfg.options.mu_sweep)
    for (int s : {1, -1}) out.push_back({mu, s});
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Context {
  const ScenarioConfig& cfg;
  const TimeSeries& series;
  VerificationReport& report;
  const std::string& dir;
};

double sup_of(const std::vector<std::vector<double>>& a) {
  double s = 0.0;
  for (const auto& r : a)
    for (double v : r) s = std::max(s, std::abs(v));
  return s;
}

// ---------------------------------------------------------------- conservation

void run_conservation(Context& c) {
  const auto& log = c.series.log;
  Csv csv(c.dir, "snapshots.csv", {"t", "min_ux", "sup_u", "E1", "E2", "E3"});
  for (const auto& r : log) csv.row({r.t, r.min_ux, r.sup_u, r.e.e1, r.e.e2, r.e.e3});
  const Conserved& e0 = log.front().e;
  const std::array<double, 3> base{e0.e1, e0.e2, e0.e3};
  std::array<double, 3> drift{0.0, 0.0, 0.0};
  for (const auto& r : log) {
    const std::array<double, 3> v{r.e.e1, r.e.e2, r.e.e3};
    for (int i = 0; i < 3; ++i) drift[i] = std::max(drift[i], std::abs(v[i] - base[i]));
  }
  for (int i = 0; i < 3; ++i) {
    // Relative drift; absolute when the initial value vanishes.
    const double scale = std::abs(base[i]) > 1e-12 ? std::abs(base[i]) : 1.0;
    c.report.checks.push_back(check(fmt::format("conservation.E{}", i + 1), drift[i] / scale, 1e-8,
                                    {{"initial", base[i]}, {"absolute_drift", drift[i]}}));
  }
}

// ------------------------------------------------------- curvature / structure

void write_geometry(const std::string& dir, const SolverState& st, const CoframeField& cf,
                    const CurvatureField& K) {
  const MetricField mf = metric(cf);
  const Field wd = wedge_density(cf);
  Csv csv(dir, fmt::format("geometry_t{:.4f}.csv", st.t()),
          {"x", "F", "wedge_density", "g11", "g12", "g22", "K"});
  const Grid& g = st.grid();
  for (std::size_t i = 0; i < g.size(); ++i)
    csv.row({g.node(i), cf.f12()[i], wd[i], mf.g11[i], mf.g12[i], mf.g22[i], K.K[i]});
}

void run_geometry(Context& c, bool curvature, bool structure) {
  const auto list = combos(c.cfg);
  std::vector<double> k_dev(list.size(), 0.0), r_sup(list.size(), 0.0), wedge(list.size(), 0.0);
  std::vector<double> k_time(list.size(), 0.0);
  std::vector<std::size_t> unmasked(list.size(), 0);
  const std::size_t K = c.series.snapshots.size();
  const std::vector<std::size_t> written{0, K / 2, K - 1};
  for (std::size_t k = 0; k < K; ++k) {
    const SolverState& st = c.series.snapshots[k];
    const SolutionJet jet = make_jet(st);
    for (std::size_t j = 0; j < list.size(); ++j) {
      const auto t0 = std::chrono::steady_clock::now();
      const CoframeField cf = coframe(jet, list[j]);
      if (curvature) {
        const CurvatureField kf = gauss_curvature(jet, cf, c.cfg.options.mask_tol);
        k_dev[j] = std::max(k_dev[j], kf.sup_deviation);
        unmasked[j] += kf.unmasked_count;
        if (list[j].mu == c.cfg.coframe.mu && list[j].sign == c.cfg.coframe.sign &&
            std::find(written.begin(), written.end(), k) != written.end())
          write_geometry(c.dir, st, cf, kf);
      }
      if (structure) {
        r_sup[j] = std::max(r_sup[j], structure_residuals(jet, cf).sup());
        wedge[j] = std::max(wedge[j], wedge_identity_residual(cf).sup_norm());
      }
      k_time[j] += seconds_since(t0);
    }
  }
  for (std::size_t j = 0; j < list.size(); ++j) {
    const std::string tag = combo_tag(list[j].mu, list[j].sign);
    if (curvature) {
      c.report.checks.push_back(check("curvature." + tag, k_dev[j], 1e-6,
                                      {{"mu", list[j].mu},
                                       {"sign", list[j].sign},
                                       {"mask_tol", c.cfg.options.mask_tol},
                                       {"unmasked_points", static_cast<double>(unmasked[j])}}));
      c.report.timings.emplace_back("curvature." + tag, k_time[j]);
    }
    if (structure) {
      c.report.checks.push_back(
          check("structure." + tag, r_sup[j], 1e-6, {{"mu", list[j].mu}, {"sign", list[j].sign}}));
      c.report.checks.push_back(info("structure.wedge_identity." + tag, wedge[j], "reported"));
    }
  }
}

// Smooth, rapidly decaying random field: gaussian envelope times a few modes.
Field random_smooth_field(const Grid& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const double width = 1.5 + 0.75 * (U(rng) + 1.0);
  const double center = 2.0 * U(rng);
  std::array<double, 5> amp, k, phase;
  for (int j = 0; j < 5; ++j) {
    amp[j] = U(rng);
    k[j] = 1.5 * (U(rng) + 1.0);
    phase[j] = 3.14159 * U(rng);
  }
  return Field::sample(g, [&](double x) {
    const double d = (x - center) / width;
    double s = 0.0;
    for (int j = 0; j < 5; ++j) s += amp[j] * std::cos(k[j] * x + phase[j]);
    return std::exp(-0.5 * d * d) * s;
  });
}

void run_offshell(Context& c) {
  const Grid g = c.cfg.grid();
  std::mt19937_64 rng(c.cfg.options.seed);
  const auto list = combos(c.cfg);
  std::vector<double> r2(list.size(), 0.0), r13(list.size(), 0.0), wid(list.size(), 0.0);
  std::vector<double> prop2(list.size(), 0.0), prop3(list.size(), 0.0), scale(list.size(), 0.0);
  for (std::size_t n = 0; n < c.cfg.options.random_fields; ++n) {
    const Field u = random_smooth_field(g, rng);
    const Field ut = random_smooth_field(g, rng);
    const SolutionJet jet = make_jet(SolverState(0.0, u), ut);
    for (std::size_t j = 0; j < list.size(); ++j) {
      const CoframeField cf = coframe(jet, list[j]);
      const StructureResiduals r = structure_residuals(jet, cf);
      const double sr = list[j].sign * list[j].root();
      r2[j] = std::max(r2[j], r.r2.sup_norm());
      r13[j] = std::max(r13[j], (r.r1 + r.r3).sup_norm());
      wid[j] = std::max(wid[j], wedge_identity_residual(cf).sup_norm());
      prop2[j] = std::max(prop2[j], (r.r2 - list[j].mu * r.r1).sup_norm());
      prop3[j] = std::max(prop3[j], (r.r3 - sr * r.r1).sup_norm());
      scale[j] = std::max(scale[j], r.r1.sup_norm());
    }
  }
  const double fields = static_cast<double>(c.cfg.options.random_fields);
  for (std::size_t j = 0; j < list.size(); ++j) {
    const std::string tag = combo_tag(list[j].mu, list[j].sign);
    Params p{{"mu", list[j].mu}, {"sign", list[j].sign}, {"fields", fields}, {"sup_R1", scale[j]}};
    c.report.checks.push_back(check("offshell.R2." + tag, r2[j], 1e-12, p));
    c.report.checks.push_back(check("offshell.R1+R3." + tag, r13[j], 1e-12, p));
    c.report.checks.push_back(check("offshell.wedge_identity." + tag, wid[j], 1e-12, p));
    // Proportionalities that hold for the coframe as defined, relative to sup|R1|.
    const double rel = std::max(1.0, scale[j]);
    c.report.checks.push_back(check("offshell.R2-mu*R1." + tag, prop2[j] / rel, 1e-12, p));
    c.report.checks.push_back(check("offshell.R3-s*root*R1." + tag, prop3[j] / rel, 1e-12, p));
  }
}

// ------------------------------------------------------------ characteristics

void run_characteristics(Context& c) {
  const auto& o = c.cfg.options;
  std::vector<double> seeds(o.flow_seeds);
  for (std::size_t i = 0; i < seeds.size(); ++i)
    seeds[i] = o.flow_lo + (o.flow_hi - o.flow_lo) * static_cast<double>(i) / (seeds.size() - 1);
  const FlowMap flow = evolve_flow(c.series, seeds);
  const auto inv = conjugation_invariant(c.series, flow);
  const auto qxq = qx_by_quadrature(flow);
  double dual = 0.0;
  for (std::size_t i = 0; i < flow.seed_count(); ++i)
    for (std::size_t k = 0; k < flow.time_count(); ++k)
      dual = std::max(dual, std::abs(flow.qx[i][k] - qxq[i][k]));
  Csv csv(c.dir, "flow.csv", {"seed", "t", "q", "qx", "qx_quadrature", "invariant_residual"});
  for (std::size_t i = 0; i < flow.seed_count(); i += std::max<std::size_t>(1, flow.seed_count() / 12))
    for (std::size_t k = 0; k < flow.time_count(); ++k)
      csv.row({flow.seeds[i], flow.times[k], flow.q[i][k], flow.qx[i][k], qxq[i][k], inv[i][k]});
  Params p{{"seeds", static_cast<double>(seeds.size())}, {"lo", o.flow_lo}, {"hi", o.flow_hi}};
  c.report.checks.push_back(check("characteristics.invariant", sup_of(inv), 1e-5, p));
  c.report.checks.push_back(check("characteristics.qx_dual_path", dual, 1e-6, p));
  c.report.checks.push_back(check("characteristics.monotone", flow.monotone() ? 0.0 : 1.0, 0.0, p));
}

// ------------------------------------------------------------ compact support

void run_asymptotics(Context& c) {
  // A bump carries its own support; other data rely on the configured interval.
  const bool bump = c.cfg.datum.kind == "bump";
  const double a = bump ? c.cfg.datum.a : c.cfg.options.support_a;
  const double b = bump ? c.cfg.datum.b : c.cfg.options.support_b;
  const SupportCurves sc = support_curves(c.series, a, b);
  Csv csv(c.dir, "support.csv", {"t", "gamma_minus", "gamma_plus", "E", "right_res", "left_res"});
  AsymptoticResidual last;
  for (std::size_t k = 0; k < c.series.snapshots.size(); ++k) {
    const SolverState& st = c.series.snapshots[k];
    const CoframeField cf = coframe(st, c.cfg.coframe);
    const MetricField mf = metric(cf);
    last = asymptotic_metric_residual(st, cf, mf, sc.gamma_minus[k], sc.gamma_plus[k]);
    csv.row({st.t(), sc.gamma_minus[k], sc.gamma_plus[k], last.E, last.right_res, last.left_res});
  }
  const double t = c.series.final_state().t();
  Params p{{"t", t}, {"mu", c.cfg.coframe.mu}, {"sign", c.cfg.coframe.sign},
           {"gamma_minus", sc.gamma_minus.back()}, {"gamma_plus", sc.gamma_plus.back()}, {"E", last.E}};
  c.report.checks.push_back(check("asymptotics.left", last.left_res, 1e-8, p));
  Params pr = p;
  pr.insert(pr.end(), {{"g11_rel", last.g11_rel}, {"g12_rel", last.g12_rel}, {"g22_rel", last.g22_rel}});
  c.report.checks.push_back(check("asymptotics.right", last.right_res, 1e-3, pr));
  c.report.checks.push_back(info("asymptotics.right_with_e^{-x}_moment", last.right_res_printed,
                                 "reported", {{"E_printed", last.E_printed}}));
}

// ----------------------------------------------------------------- blow-up

void run_blowup(Context& c) {
  const Grid g = c.cfg.grid();
  const Field m0 = initial_momentum(c.cfg.datum, g);
  const double x0 = c.cfg.options.blowup_x0;
  const SignReport sr = check_sign_conditions(m0, x0);
  c.report.checks.push_back(check("blowup.sign_conditions", static_cast<double>(sr.violations.size()),
                                  0.0, {{"x0", x0}, {"I0", sr.I0}, {"g0", sr.g0}}));
  if (!sr.passed) return;
  BlowupCertificate cert = make_blowup_certificate(m0, x0, c.cfg.coframe.mu, c.cfg.coframe.sign);
  cert = blowup_track(c.series, cert);
  const RiccatiReport rep = verify_riccati_bound(cert, c.cfg.options.blowup_threshold);
  const Params p{{"x0", cert.x0}, {"I0", cert.I0}, {"g0", cert.g0}, {"T0", cert.T0}};
  c.report.checks.push_back(check("blowup.I_decreasing_negative", rep.I_decreasing_negative ? 0.0 : 1.0, 0.0, p));
  c.report.checks.push_back(check("blowup.g_nondecreasing", rep.g_nondecreasing ? 0.0 : 1.0, 0.0, p));
  {
    CheckResult b = check("blowup.bound", std::max(0.0, rep.worst_bound_excess), 0.0, p);
    b.passed = rep.bound_ok;
    b.verdict = b.passed ? "pass" : "fail";
    c.report.checks.push_back(b);
  }
  const double cross = rep.threshold_cross_time.value_or(inf);
  Params pc = p;
  pc.emplace_back("threshold", c.cfg.options.blowup_threshold);
  pc.emplace_back("max_g22", rep.max_g22);
  c.report.checks.push_back(check("blowup.threshold_cross_before_T0", cross, cert.T0, pc));
  c.report.checks.push_back(info("blowup.riccati_quotient", rep.worst_riccati_gap,
                                 rep.riccati_ok ? "holds" : "violated"));
  c.report.checks.push_back(info("blowup.exponential_growth", rep.exponential_growth_ok ? 0.0 : 1.0,
                                 rep.exponential_growth_ok ? "holds" : "violated"));
  const std::string status = c.series.status == RunStatus::completed          ? "completed"
                             : c.series.status == RunStatus::blow_up_detected ? "blow-up-detected"
                                                                              : "resolution-lost";
  c.report.checks.push_back(info("blowup.solver_status", c.series.final_state().t(),
                                 status + (c.series.stop ? ": " + c.series.stop->reason : "")));

  json cj = {{"x0", cert.x0}, {"I0", cert.I0}, {"g0", cert.g0}, {"T0", cert.T0},
             {"threshold_cross_time", rep.threshold_cross_time ? json(*rep.threshold_cross_time) : json(nullptr)},
             {"passed", rep.passed}, {"violations", rep.violations}};
  write_text(c.dir, "certificate.json", cj.dump(2) + "\n");
  Csv csv(c.dir, "blowup_trajectory.csv", {"t", "q", "I", "I_point", "g", "f", "g22", "g12", "m_along"});
  for (const auto& s : cert.trajectory) csv.row({s.t, s.q, s.I, s.I_point, s.g, s.f, s.g22, s.g12, s.m_along});
}

// The inequalities are stated at the blow-up characteristic, where m changes sign;
// sample (q(t), t) pairs evenly over the stored snapshots.
void run_appendix(Context& c) {
  const std::size_t K = c.series.snapshots.size();
  const std::size_t total = c.cfg.options.appendix_points;
  if (K < 2 || total == 0) throw Error(ErrorKind::invalid_argument, "appendix check needs snapshots and points");
  const FlowMap flow = evolve_flow(c.series, {c.cfg.options.blowup_x0});
  Csv csv(c.dir, "appendix.csv", {"t", "q", "M", "I", "lhs1", "rhs1", "lhs2", "rhs2"});
  std::size_t bad1 = 0, bad2 = 0;
  double margin1 = inf, margin2 = inf;
  for (std::size_t n = 0; n < total; ++n) {
    const std::size_t k = total == 1 ? K - 1 : n * (K - 1) / (total - 1);
    const AppendixReport r = verify_appendix_inequalities(c.series.snapshots[k], flow.q[0][k]);
    csv.row({r.t, r.q, r.M, r.I, r.lhs1, r.rhs1, r.lhs2, r.rhs2});
    if (!r.strict1) ++bad1;
    if (!r.strict2) ++bad2;
    margin1 = std::min(margin1, r.lhs1 - r.rhs1);
    margin2 = std::min(margin2, r.lhs2 - r.rhs2);
  }
  const double pts = static_cast<double>(total);
  c.report.checks.push_back(check("appendix.inequality1", static_cast<double>(bad1), 0.0,
                                  {{"points", pts}, {"min_margin", margin1}}));
  c.report.checks.push_back(check("appendix.inequality2", static_cast<double>(bad2), 0.0,
                                  {{"points", pts}, {"min_margin", margin2}}));
}

// ------------------------------------------------------------------- global

void run_global(Context& c) {
  const Field m0 = initial_momentum(c.cfg.datum, c.cfg.grid());
  GlobalCertificate cert = make_global_certificate(m0);
  const GlobalReport rep = verify_global_bound(c.series, cert);
  Csv csv(c.dir, "global.csv", {"t", "sup_ux", "sup_u", "l1_m", "min_signed_m"});
  for (std::size_t k = 0; k < cert.times.size(); ++k)
    csv.row({cert.times[k], cert.sup_ux[k], cert.sup_u[k], cert.l1_m[k], cert.min_signed_m[k]});
  const Params p{{"l1_mass", cert.l1_mass}, {"m0_sign", cert.m0_sign}, {"t_end", c.series.final_state().t()}};
  c.report.checks.push_back(check("global.ux_bound", rep.max_ux_excess, 1e-8, p));
  c.report.checks.push_back(check("global.no_stop", rep.stop_triggered ? 1.0 : 0.0, 0.0, p));
  c.report.checks.push_back(check("global.sign_preserved", std::max(0.0, -rep.worst_sign), 1e-8, p));
  c.report.checks.push_back(info("global.u_bound", rep.max_u_excess, rep.max_u_excess <= 1e-8 ? "holds" : "violated"));
  c.report.checks.push_back(info("global.l1_drift", rep.max_l1_drift, "reported"));
}

// ------------------------------------------------------------- integrability

void run_integrability(Context& c) {
  const auto list = combos(c.cfg);
  const std::size_t n = list.size();
  std::vector<double> triad(n, 0.0), zprinted(n, 0.0), zres(n, 0.0), gx(n, 0.0), gt(n, 0.0),
      gsx(n, 0.0), gst(n, 0.0), gder(n, 0.0), gdet(n, inf);
  std::vector<std::optional<double>> singular(n);
  double theta = 0.0, pp = 0.0, zbar = 0.0, zbar_printed = 0.0;
  for (const SolverState& st : c.series.snapshots) {
    const SolutionJet jet = make_jet(st);
    const ThetaTriad th = theta_triad(jet.m, jet.F);
    theta = std::max(theta, theta_structure_residual(jet).sup_norm());
    pp = std::max(pp, pseudo_potential_residual(jet).sup_norm());
    zbar = std::max(zbar, zcr_residual_bar(jet).sup_entry());
    zbar_printed = std::max(zbar_printed, zcr_difference(zcr_matrices(th), printed_zcr_bar(jet.m, jet.F)));
    for (std::size_t j = 0; j < n; ++j) {
      const CoframeField cf = coframe(jet, list[j]);
      triad[j] = std::max(triad[j], triad_transform_check(cf, th));
      zprinted[j] = std::max(zprinted[j], zcr_difference(zcr_matrices(cf),
                                                         printed_zcr(jet.m, jet.F, list[j].mu, list[j].sign)));
      zres[j] = std::max(zres[j], zcr_residual(jet, cf).sup_entry());
      const GaugeReport gr = gauge_conjugation_check(jet, list[j].mu, list[j].sign);
      gx[j] = std::max(gx[j], gr.x_residual);
      gt[j] = std::max(gt[j], gr.t_residual);
      gsx[j] = std::max(gsx[j], gr.scaled_x_residual);
      gst[j] = std::max(gst[j], gr.scaled_t_residual);
      gder[j] = std::max(gder[j], gr.derivative_mismatch);
      gdet[j] = std::min(gdet[j], gr.min_abs_det);
      if (gr.singular_at && !singular[j]) singular[j] = gr.singular_at;
    }
  }
  // Gauge conjugation at random momentum and F values.
  {
    const Grid g = c.cfg.grid();
    std::mt19937_64 rng(c.cfg.options.seed);
    std::uniform_real_distribution<double> U(-3.0, 3.0);
    std::vector<double> mv(g.size()), fv(g.size()), tv(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      mv[i] = U(rng);
      fv[i] = U(rng);
      tv[i] = U(rng);
    }
    SolutionJet jet = make_jet(SolverState(0.0, Field::zeros(g)), Field::zeros(g));
    jet.m = Field(g, mv);
    jet.F = Field(g, fv);
    jet.mt = Field(g, tv);
    for (std::size_t j = 0; j < n; ++j) {
      const GaugeReport gr = gauge_conjugation_check(jet, list[j].mu, list[j].sign);
      gx[j] = std::max(gx[j], gr.x_residual);
      gt[j] = std::max(gt[j], gr.t_residual);
      gsx[j] = std::max(gsx[j], gr.scaled_x_residual);
      gst[j] = std::max(gst[j], gr.scaled_t_residual);
      gdet[j] = std::min(gdet[j], gr.min_abs_det);
      if (gr.singular_at && !singular[j]) singular[j] = gr.singular_at;
    }
  }
  auto& checks = c.report.checks;
  checks.push_back(check("integrability.theta_structure", theta, 1e-6));
  checks.push_back(check("integrability.pseudo_potential", pp, 1e-6));
  checks.push_back(check("integrability.zcr_bar_printed", zbar_printed, 1e-10));
  checks.push_back(check("integrability.zcr_bar_residual", zbar, 1e-6));
  for (std::size_t j = 0; j < n; ++j) {
    const std::string tag = combo_tag(list[j].mu, list[j].sign);
    const Params p{{"mu", list[j].mu}, {"sign", list[j].sign}};
    checks.push_back(check("integrability.triad_transform." + tag, triad[j], 1e-10, p));
    checks.push_back(check("integrability.zcr_printed." + tag, zprinted[j], 1e-10, p));
    checks.push_back(check("integrability.zcr_residual." + tag, zres[j], 1e-6, p));
    Params pg = p;
    pg.emplace_back("min_abs_det", gdet[j]);
    if (singular[j]) pg.emplace_back("singular_at", *singular[j]);
    CheckResult gc = check("integrability.gauge." + tag, std::max({gx[j], gt[j]}), 1e-10, pg);
    if (singular[j]) {
      gc.passed = false;
      gc.verdict = fmt::format("singular gauge matrix at x={:.6g}", *singular[j]);
    }
    checks.push_back(gc);
    checks.push_back(check("integrability.gauge_scaling." + tag,
                           std::max({std::abs(gsx[j] - gx[j]), std::abs(gst[j] - gt[j]), gsx[j], gst[j]}),
                           1e-10, p));
    checks.push_back(info("integrability.gauge_derivative_terms." + tag, gder[j],
                          "sup |d_t Xbar - S (d_t X) S^-1|, reported"));
  }

  // Conservation law for each zeta.
  std::vector<std::string> verdicts;
  json readings = json::array();
  for (double z : c.cfg.options.zetas) {
    const ConservationReport rep = conservation_law_check(c.series, z);
    verdicts.push_back(rep.verdict);
    Params p{{"zeta", z}, {"e1_drift", rep.e1_drift}};
    double selected = inf;
    std::size_t satisfied = 0;
    for (const auto& r : rep.readings) {
      p.emplace_back(r.name + ".drift", r.drift);
      p.emplace_back(r.name + ".local", r.local_residual);
      if (r.satisfied) {
        ++satisfied;
        selected = r.drift;
      }
    }
    CheckResult cr = check(fmt::format("integrability.conservation.zeta={:g}", z), selected, 1e-5, p);
    cr.verdict = rep.verdict;
    if (satisfied != 1) cr.passed = false;
    checks.push_back(cr);
  }
  const bool same = std::all_of(verdicts.begin(), verdicts.end(), [&](const std::string& v) { return v == verdicts.front(); });
  CheckResult cons = check("integrability.conservation.zeta_independent", same ? 0.0 : 1.0, 0.0);
  cons.verdict = verdicts.empty() ? "none" : verdicts.front();
  checks.push_back(cons);

  // Two-path consistency of the gamma-bar system.
  {
    const SeriesInterpolant interp(c.series);
    const PathConsistency pc =
        gamma_bar_two_paths(c.series, interp, 0, c.series.snapshots.size() - 1, -3.0, 3.0, -1.0);
    checks.push_back(check("integrability.two_path", pc.difference, 1e-5,
                           {{"x_then_t", pc.x_then_t}, {"t_then_x", pc.t_then_x}}));
  }
  // Pole location against the closed form for constant momentum.
  {
    const Grid g = c.cfg.grid();
    double worst = 0.0;
    for (double cc : {1.0, 3.0})
      for (double g0 : {0.5, 2.0}) {
        const GammaBarProfile prof = gamma_bar_integrate(Field::constant(g, cc - 2.0), g0, -10.0, 20.0);
        const double expect = prof.x.front() + riccati_pole_distance(cc, g0);
        worst = std::max(worst, prof.pole ? std::abs(*prof.pole - expect) : inf);
      }
    checks.push_back(check("integrability.riccati_pole", worst, 1e-6));
  }
}

// ----------------------------------------------------------------- immersion

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

void run_immersion(Context& c) {
  const auto& o = c.cfg.options;
  json report = {{"cases", json::array()}};
  auto& checks = c.report.checks;
  if (o.immersion_cases.empty()) throw Error(ErrorKind::config_error, "no immersion cases configured");

  // Endpoints of {L > 0} by bisection on L itself.
  for (const auto& ic : o.immersion_cases) {
    const ValidityInterval iv = mu0_validity_interval(ic.sigma, ic.b0);
    const std::string tag = fmt::format("sigma={:g},b0={:g}", ic.sigma, ic.b0);
    const Params p{{"sigma", ic.sigma}, {"b0", ic.b0}, {"lo", iv.lo}, {"hi", iv.hi}};
    if (ic.b0 == 0.0 || !(ic.sigma * ic.sigma > 4.0 * ic.b0 * ic.b0)) {
      checks.push_back(info("immersion.interval." + tag, 0.0, "no oracle for this case", p));
      continue;
    }
    auto L = [&](double x) {
      return ic.sigma * std::exp(4.0 * x) - ic.b0 * ic.b0 * std::exp(8.0 * x) - 1.0;
    };
    const double peak = 0.25 * std::log(ic.sigma / (2.0 * ic.b0 * ic.b0));
    const double lo = bisect(L, peak - 20.0, peak);
    const double hi = bisect(L, peak, peak + 20.0);
    Params pp = p;
    pp.insert(pp.end(), {{"oracle_lo", lo}, {"oracle_hi", hi}});
    checks.push_back(check("immersion.interval." + tag, std::max(std::abs(iv.lo - lo), std::abs(iv.hi - hi)), 1e-10, pp));
    report["cases"].push_back({{"sigma", ic.sigma}, {"b0", ic.b0}, {"lo", iv.lo}, {"hi", iv.hi},
                               {"oracle_lo", lo}, {"oracle_hi", hi}});
  }

  const SolverState& ref = c.series.final_state();
  SecondFormParams base;
  base.sigma = o.immersion_cases.front().sigma;
  base.b0 = o.immersion_cases.front().b0;
  const ConventionVerdict cv = resolve_convention(ref, base, 0.0, c.cfg.coframe.sign);
  checks.push_back(info("immersion.convention", std::min(cv.score_dx, cv.score_dz), to_string(cv.chosen),
                        {{"score_dx", cv.score_dx}, {"score_dz", cv.score_dz}}));
  report["convention"] = {{"chosen", to_string(cv.chosen)}, {"score_dx", cv.score_dx}, {"score_dz", cv.score_dz}};

  const Grid g = c.cfg.grid();
  for (const auto& ic : o.immersion_cases) {
    SecondFormParams sp = base;
    sp.sigma = ic.sigma;
    sp.b0 = ic.b0;
    sp.convention = cv.chosen;
    const SecondFormField sff = second_form_mu0(sp, g);
    double gs = 0.0, c1 = 0.0, c2 = 0.0;
    BonnetReport last;
    for (const SolverState& st : c.series.snapshots) {
      const SolutionJet jet = make_jet(st);
      last = bonnet_residuals(jet, coframe(jet, {0.0, c.cfg.coframe.sign}), sff, o.mask_tol);
      gs = std::max(gs, last.gauss_scalar);
      c1 = std::max(c1, last.codazzi1);
      c2 = std::max(c2, last.codazzi2);
    }
    const std::string tag = fmt::format("sigma={:g},b0={:g}", ic.sigma, ic.b0);
    const Params p{{"sigma", ic.sigma}, {"b0", ic.b0}, {"points", static_cast<double>(last.points)}};
    checks.push_back(check("immersion.gauss." + tag, gs, 1e-6, p));
    checks.push_back(check("immersion.codazzi." + tag, std::max(c1, c2), 1e-6, p));
    Csv csv(c.dir, fmt::format("immersion_sigma{:g}_b0{:g}.csv", ic.sigma, ic.b0),
            {"x", "a", "b", "c", "delta", "gauss_scalar", "codazzi1", "codazzi2"});
    for (std::size_t i = 0; i < sff.size(); ++i)
      csv.row({sff.x[i], sff.a[i], sff.b[i], sff.c[i], sff.delta[i], last.gauss_scalar_at[i],
               last.codazzi1_at[i], last.codazzi2_at[i]});
  }

  // mu != 0 through the ODE.
  SecondFormParams op;
  op.b0 = o.immersion_b0;
  op.x_begin = o.immersion_x_begin;
  op.x_end = o.immersion_x_end;
  op.branch = 1;
  op.convention = cv.chosen;
  const SecondFormField ode = second_form_ode(op, g, o.immersion_mu);
  const double dmin = ode.delta.empty() ? -inf : *std::min_element(ode.delta.begin(), ode.delta.end());
  const Params p{{"mu", o.immersion_mu}, {"b0", op.b0}, {"nodes", static_cast<double>(ode.size())},
                 {"x_lo", ode.interval.lo}, {"x_hi", ode.interval.hi}, {"min_delta", dmin}};
  checks.push_back(check("immersion.ode.delta_positive", dmin > 0.0 ? 0.0 : -dmin + 1.0, 0.0, p));
  checks.push_back(check("immersion.ode.nonempty", ode.size() >= 2 ? 0.0 : 1.0, 0.0, p));
  const SolutionJet jet = make_jet(ref);
  const BonnetReport br = bonnet_residuals(jet, coframe(jet, {o.immersion_mu, c.cfg.coframe.sign}), ode, o.mask_tol);
  checks.push_back(check("immersion.ode.bonnet", std::max({br.gauss_scalar, br.codazzi1, br.codazzi2}), 1e-6, p));
  Csv csv(c.dir, fmt::format("immersion_mu{:g}.csv", o.immersion_mu),
          {"x", "a", "b", "c", "delta", "gauss_scalar", "codazzi1", "codazzi2"});
  for (std::size_t i = 0; i < ode.size(); ++i)
    csv.row({ode.x[i], ode.a[i], ode.b[i], ode.c[i], ode.delta[i], br.gauss_scalar_at[i], br.codazzi1_at[i],
             br.codazzi2_at[i]});
  report["ode"] = {{"mu", o.immersion_mu}, {"lo", ode.interval.lo}, {"hi", ode.interval.hi},
                   {"nodes", ode.size()}, {"boundary", ode.boundary ? json(*ode.boundary) : json(nullptr)}};
  write_text(c.dir, "validity.json", report.dump(2) + "\n");
}

}  // namespace

VerificationReport run_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  VerificationReport report;
  report.scenario = cfg.name;
  if (!cfg.output_dir.empty()) fs::create_directories(cfg.output_dir);
  write_text(cfg.output_dir, "config.json", config_to_json(cfg));
  if (cfg.diagnostics.empty()) {
    write_text(cfg.output_dir, "report.json", report_to_json(report));
    return report;
  }

  const Grid grid = cfg.grid();
  const Field u0 = make_initial_datum(cfg.datum, grid);
  spdlog::info("{}: solving N={} L={} dt={} t_end={}", cfg.name, cfg.N, cfg.L, cfg.solver.dt, cfg.solver.t_end);
  auto t0 = std::chrono::steady_clock::now();
  const TimeSeries series = run(u0, cfg.solver);
  report.timings.emplace_back("solver", seconds_since(t0));
  const std::string& dir = cfg.output_dir;
  Context ctx{cfg, series, report, dir};

  auto has = [&](const char* d) {
    return std::find(cfg.diagnostics.begin(), cfg.diagnostics.end(), d) != cfg.diagnostics.end();
  };
  auto guarded = [&](const std::string& name, const std::function<void()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
      fn();
    } catch (const std::exception& e) {
      CheckResult f = check(name + ".error", inf, 0.0);
      f.verdict = e.what();
      report.checks.push_back(f);
      spdlog::error("{}: {} failed: {}", cfg.name, name, e.what());
    }
    report.timings.emplace_back(name, seconds_since(start));
  };

  if (has("conservation") || !dir.empty()) {
    if (has("conservation"))
      guarded("conservation", [&] { run_conservation(ctx); });
    else
      guarded("snapshots", [&] {
        Csv csv(dir, "snapshots.csv", {"t", "min_ux", "sup_u", "E1", "E2", "E3"});
        for (const auto& r : series.log) csv.row({r.t, r.min_ux, r.sup_u, r.e.e1, r.e.e2, r.e.e3});
      });
  }
  if (has("curvature") || has("structure"))
    guarded("geometry", [&] { run_geometry(ctx, has("curvature"), has("structure")); });
  if (has("offshell")) guarded("offshell", [&] { run_offshell(ctx); });
  if (has("characteristics")) guarded("characteristics", [&] { run_characteristics(ctx); });
  if (has("asymptotics")) guarded("asymptotics", [&] { run_asymptotics(ctx); });
  if (has("blowup")) guarded("blowup", [&] { run_blowup(ctx); });
  if (has("appendix")) guarded("appendix", [&] { run_appendix(ctx); });
  if (has("global")) guarded("global", [&] { run_global(ctx); });
  if (has("integrability")) guarded("integrability", [&] { run_integrability(ctx); });
  if (has("immersion")) guarded("immersion", [&] { run_immersion(ctx); });

  write_text(dir, "report.json", report_to_json(report));
  if (!dir.empty()) {
    json tj = json::object();
    for (const auto& [k, v] : report.timings) tj[k] = v;
    write_text(dir, "timings.json", tj.dump(2) + "\n");
  }
  spdlog::info("{}: {} checks, {} failed", cfg.name, report.checks.size(), report.failures());
  return report;
}

// -------------------------------------------------------------- convergence

namespace {

Field final_profile(const ScenarioConfig& base, std::size_t N, double dt, double t_end) {
  SolverConfig sc = base.solver;
  sc.dt = dt;
  sc.t_end = t_end;
  sc.snapshot_stride = 1;
  const Grid g(base.L, N);
  const TimeSeries ts = run(make_initial_datum(base.datum, g), sc);
  if (ts.status != RunStatus::completed)
    throw Error(ErrorKind::blow_up_detected, "convergence run stopped early");
  return ts.final_state().u();
}

double sup_diff_on_coarse(const Field& coarse, const Field& fine) {
  const std::size_t ratio = fine.size() / coarse.size();
  double e = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) e = std::max(e, std::abs(coarse[i] - fine[i * ratio]));
  return e;
}

}  // namespace

ConvergenceTable convergence_study(const ScenarioConfig& base, const ConvergenceOptions& opt) {
  if (opt.temporal_levels < 3 || opt.spatial_N.size() < 3)
    throw Error(ErrorKind::invalid_argument, "convergence study needs at least three refinement levels");
  ConvergenceTable table;
  // Temporal: fixed N, dt halved, reference at dt_finest / 8.
  const double dt_ref = opt.dt_coarse / std::pow(2.0, static_cast<double>(opt.temporal_levels - 1)) / 8.0;
  const Field ref = final_profile(base, opt.temporal_N, dt_ref, opt.t_end);
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < opt.temporal_levels; ++k) {
    const double dt = opt.dt_coarse / std::pow(2.0, static_cast<double>(k));
    const double err = (final_profile(base, opt.temporal_N, dt, opt.t_end) - ref).sup_norm();
    table.rows.push_back({"temporal", opt.temporal_N, dt, err});
    if (err > 0.0) {
      lx.push_back(std::log(dt));
      ly.push_back(std::log(err));
    }
  }
  if (lx.size() >= 2) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    table.temporal_order = sxy / sxx;
  } else {
    table.temporal_order = std::numeric_limits<double>::quiet_NaN();
  }
  // Spatial: fixed dt, N doubled, reference at the largest N.
  std::vector<std::size_t> Ns = opt.spatial_N;
  std::sort(Ns.begin(), Ns.end());
  const Field fine = final_profile(base, Ns.back(), opt.spatial_dt, opt.t_end);
  table.floor_error = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i + 1 < Ns.size(); ++i) {
    const double err = sup_diff_on_coarse(final_profile(base, Ns[i], opt.spatial_dt, opt.t_end), fine);
    table.rows.push_back({"spatial", Ns[i], opt.spatial_dt, err});
    if (Ns[i] == opt.floor_N) table.floor_error = err;
  }
  table.floor_reached = std::isfinite(table.floor_error) && table.floor_error <= opt.floor_tol;
  return table;
}

std::string convergence_to_csv(const ConvergenceTable& table) {
  std::string out = "sweep,N,dt,error\n";
  for (const auto& r : table.rows) out += fmt::format("{},{},{},{}\n", r.sweep, r.N, cell(r.dt), cell(r.error));
  return out;
}

}  // namespace dpgeo
