#include "dpgeo/blowup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dpgeo/quadrature.hpp"
#include "dpgeo/spectral.hpp"

namespace dpgeo {

namespace {
std::string fmt_at(const char* what, double t, double x) {
  std::ostringstream os;
  os << what << " at t=" << t << " x=" << x;
  return os.str();
}
}  // namespace

SignReport check_sign_conditions(const Field& m0, double x0, double tol) {
  SignReport rep;
  const Grid& g = m0.grid();
  for (std::size_t i = 0; i < m0.size(); ++i) {
    const double x = g.node(i);
    const bool bad_right = x > x0 && m0[i] > tol;
    const bool bad_left = x < x0 && m0[i] < -tol;
    if (bad_right || bad_left) {
      rep.passed = false;
      if (!rep.offending_x) rep.offending_x = x;
      rep.violations.push_back(fmt_at(bad_right ? "m0 > 0 right of x0" : "m0 < 0 left of x0", 0.0, x));
      if (rep.violations.size() >= 8) break;
    }
  }
  ExponentialSplit split(m0, 1.0);
  rep.I0 = split.right_at(x0);  // exp(x0) int_{x0}^L exp(-z) m0
  rep.g0 = split.left_at(x0);   // (u0 - u0')(x0)
  return rep;
}

BlowupCertificate make_blowup_certificate(const Field& m0, double x0, double mu, int sign) {
  const SignReport rep = check_sign_conditions(m0, x0);
  if (!rep.passed)
    throw LocatedError(ErrorKind::certificate_invalid, "sign conditions violated: " + rep.violations.front(),
                       *rep.offending_x);
  if (!(rep.I0 < 0.0) || !(rep.g0 > 0.0))
    throw LocatedError(ErrorKind::certificate_invalid,
                       "degenerate datum: need I0 < 0 and g0 > 0 (T0 undefined)", x0);
  BlowupCertificate c;
  c.x0 = x0;
  c.I0 = rep.I0;
  c.g0 = rep.g0;
  c.T0 = -1.0 / (rep.I0 * rep.g0 * rep.g0);
  c.mu = mu;
  c.sign = sign;
  return c;
}

BlowupCertificate blowup_track(const TimeSeries& series, BlowupCertificate cert) {
  const FlowMap flow = evolve_flow(series, {cert.x0});
  const double r2 = 1.0 + cert.mu * cert.mu;
  cert.trajectory.clear();
  for (std::size_t k = 0; k < flow.times.size(); ++k) {
    const SolverState& s = series.snapshots[k];
    const double q = flow.q[0][k];
    BlowupSample b;
    b.t = flow.times[k];
    b.q = q;
    b.I = ExponentialSplit(s.m(), 1.0).right_at(q);
    double d[2];
    SpectralInterpolant(s.u()).derivatives(q, 1, d);
    b.I_point = d[0] + d[1];
    b.g = d[0] - d[1];
    b.f = b.g * b.g;
    b.g22 = r2 * b.f * b.f;
    b.g12 = cert.sign * 2.0 * cert.mu * std::sqrt(r2) * b.f;
    b.m_along = SpectralInterpolant(s.m()).value(q);
    cert.trajectory.push_back(b);
  }
  return cert;
}

RiccatiReport verify_riccati_bound(const BlowupCertificate& cert, double threshold, double tol) {
  RiccatiReport rep;
  const auto& tr = cert.trajectory;
  if (tr.size() < 3) {
    rep.violations.push_back("trajectory has fewer than 3 points");
    return rep;
  }
  const double f0 = tr.front().f;
  const double cap = 1.0 / f0;
  rep.worst_riccati_gap = INFINITY;
  rep.worst_bound_excess = -INFINITY;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const auto& s = tr[k];
    rep.max_g22 = std::max(rep.max_g22, s.g22);
    rep.max_abs_m_along = std::max(rep.max_abs_m_along, std::abs(s.m_along));
    if (!rep.threshold_cross_time && s.g22 > threshold) {
      if (k > 0) {
        // Linear interpolation of log g22 between the bracketing samples.
        const auto& p = tr[k - 1];
        const double a = std::log(p.g22), b = std::log(s.g22), c = std::log(threshold);
        rep.threshold_cross_time = p.t + (s.t - p.t) * (c - a) / (b - a);
      } else {
        rep.threshold_cross_time = s.t;
      }
    }
    const double mono = 1.0 / s.f - cert.I0 * s.t;
    const double excess = mono - cap;
    rep.worst_bound_excess = std::max(rep.worst_bound_excess, excess);
    if (!(mono > 0.0) || excess > tol * std::max(1.0, cap)) {
      if (rep.bound_ok) rep.violations.push_back(fmt_at("1/f - I0 t outside (0, 1/f(0)]", s.t, s.q));
      rep.bound_ok = false;
    }
    if (s.f < f0 * std::exp(-cert.I0 * s.t) * (1.0 - tol)) {
      if (rep.exponential_growth_ok) rep.violations.push_back(fmt_at("f below f(0) exp(-I0 t)", s.t, s.q));
      rep.exponential_growth_ok = false;
    }
    if (!(s.I < 0.0)) {
      if (rep.I_decreasing_negative) rep.violations.push_back(fmt_at("I(t) not negative", s.t, s.q));
      rep.I_decreasing_negative = false;
    }
    if (cert.mu == 0.0 && s.g12 != 0.0) rep.g12_zero_at_mu0 = false;
    if (k == 0) continue;
    const auto& p = tr[k - 1];
    if (s.I > p.I + tol * std::max(1.0, std::abs(p.I))) {
      if (rep.I_decreasing_negative) rep.violations.push_back(fmt_at("I(t) increased", s.t, s.q));
      rep.I_decreasing_negative = false;
    }
    if (s.g < p.g - tol * std::max(1.0, std::abs(p.g))) {
      if (rep.g_nondecreasing) rep.violations.push_back(fmt_at("g(t) decreased", s.t, s.q));
      rep.g_nondecreasing = false;
    }
    const double dt = s.t - p.t;
    const double quotient = (s.f - p.f) / dt;
    const double fl = std::min(s.f, p.f);
    const double need = -cert.I0 * fl * fl;
    const double gap = (quotient - need) / std::max(1.0, need);
    rep.worst_riccati_gap = std::min(rep.worst_riccati_gap, gap);
    if (gap < -tol) {
      if (rep.riccati_ok) rep.violations.push_back(fmt_at("f' below (-I0) f^2", s.t, s.q));
      rep.riccati_ok = false;
    }
  }
  rep.crossed_before_T0 = rep.threshold_cross_time && *rep.threshold_cross_time < cert.T0;
  if (!rep.threshold_cross_time)
    rep.violations.push_back("g22 along the characteristic never exceeded the threshold");
  else if (!rep.crossed_before_T0)
    rep.violations.push_back("g22 threshold crossed after T0");
  rep.passed = rep.riccati_ok && rep.bound_ok && rep.I_decreasing_negative && rep.g_nondecreasing &&
               rep.g12_zero_at_mu0 && rep.crossed_before_T0;
  return rep;
}

AppendixReport verify_appendix_inequalities(const SolverState& state, double q) {
  AppendixReport rep;
  rep.t = state.t();
  rep.q = q;
  const Field& u = state.u();
  const Field ux = deriv(u, 1);
  const Field w = hadamard(u, u) - hadamard(ux, ux);
  const ExponentialSplit split(w, 1.0);
  double d[2];
  SpectralInterpolant(u).derivatives(q, 1, d);
  rep.M = d[0] - d[1];
  rep.I = d[0] + d[1];
  rep.lhs1 = split.left_at(q);
  rep.rhs1 = d[0] * d[0] - d[1] * d[1];
  rep.lhs2 = std::exp(-q) * split.right_at(q);
  rep.rhs2 = std::exp(-q) * rep.M * rep.I;
  const double s1 = 1e-13 * std::max({1.0, std::abs(rep.lhs1), std::abs(rep.rhs1)});
  const double s2 = 1e-13 * std::max({1.0, std::abs(rep.lhs2), std::abs(rep.rhs2)});
  rep.holds1 = rep.lhs1 >= rep.rhs1 - s1;
  rep.holds2 = rep.lhs2 >= rep.rhs2 - s2;
  rep.strict1 = rep.lhs1 > rep.rhs1 + s1;
  rep.strict2 = rep.lhs2 > rep.rhs2 + s2;
  return rep;
}

GlobalCertificate make_global_certificate(const Field& m0) {
  const double tol = 1e-12;
  const bool nonneg = std::all_of(m0.values().begin(), m0.values().end(), [&](double v) { return v >= -tol; });
  const bool nonpos = std::all_of(m0.values().begin(), m0.values().end(), [&](double v) { return v <= tol; });
  if (!nonneg && !nonpos) {
    auto it = std::min_element(m0.values().begin(), m0.values().end());
    throw LocatedError(ErrorKind::certificate_invalid, "m0 changes sign",
                       m0.grid().node(static_cast<std::size_t>(it - m0.values().begin())));
  }
  GlobalCertificate c;
  c.m0_sign = nonneg ? 1 : -1;
  c.l1_mass = riemann_sum(m0.map([](double v) { return std::abs(v); }));
  return c;
}

GlobalReport verify_global_bound(const TimeSeries& series, GlobalCertificate& cert, double sign_floor) {
  GlobalReport rep;
  rep.stop_triggered = series.status != RunStatus::completed;
  if (rep.stop_triggered) rep.violations.push_back("solver stop criterion fired");
  cert.times.clear();
  cert.sup_ux.clear();
  cert.sup_u.clear();
  cert.l1_m.clear();
  cert.min_signed_m.clear();
  rep.max_ux_excess = -INFINITY;
  rep.max_u_excess = -INFINITY;
  rep.worst_sign = INFINITY;
  for (const auto& s : series.snapshots) {
    const Field ux = deriv(s.u(), 1);
    const double sux = ux.sup_norm();
    const double su = s.u().sup_norm();
    const double l1 = riemann_sum(s.m().map([](double v) { return std::abs(v); }));
    double ms = INFINITY;
    std::size_t at = 0;
    for (std::size_t i = 0; i < s.m().size(); ++i) {
      const double v = cert.m0_sign * s.m()[i];
      if (v < ms) {
        ms = v;
        at = i;
      }
    }
    cert.times.push_back(s.t());
    cert.sup_ux.push_back(sux);
    cert.sup_u.push_back(su);
    cert.l1_m.push_back(l1);
    cert.min_signed_m.push_back(ms);
    rep.max_ux_excess = std::max(rep.max_ux_excess, sux - cert.l1_mass);
    rep.max_u_excess = std::max(rep.max_u_excess, su - cert.l1_mass);
    rep.max_l1_drift = std::max(rep.max_l1_drift, std::abs(l1 - cert.l1_mass));
    rep.worst_sign = std::min(rep.worst_sign, ms);
    if (sux > cert.l1_mass + 1e-8) {
      const auto it = std::max_element(ux.values().begin(), ux.values().end(),
                                       [](double a, double b) { return std::abs(a) < std::abs(b); });
      rep.violations.push_back(fmt_at("sup|u_x| above L1 mass", s.t(),
                                      s.grid().node(static_cast<std::size_t>(it - ux.values().begin()))));
      rep.passed = false;
    }
    if (ms < -sign_floor) {
      rep.violations.push_back(fmt_at("sign of m flipped", s.t(), s.grid().node(at)));
      rep.passed = false;
    }
  }
  if (rep.max_l1_drift > 1e-6) {
    rep.violations.push_back("L1 norm of m drifted by more than 1e-6");
    rep.passed = false;
  }
  if (rep.stop_triggered) rep.passed = false;
  return rep;
}

}  // namespace dpgeo
