#include "dpgeo/characteristics.hpp"

#include <algorithm>
#include <cmath>

#include "dpgeo/quadrature.hpp"

namespace dpgeo {

bool FlowMap::monotone() const {
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      if (!(qx[s][k] > 0.0)) return false;
      if (s > 0 && !(q[s][k] > q[s - 1][k])) return false;
    }
  }
  return true;
}

namespace {

struct Velocity {
  std::vector<double> u, ux;
};

Velocity sample(const SeriesInterpolant& interp, double t, const std::vector<double>& x) {
  const SpectralInterpolant si(interp.spectrum_at(t));
  Velocity v{std::vector<double>(x.size()), std::vector<double>(x.size())};
  double d[2];
  for (std::size_t s = 0; s < x.size(); ++s) {
    si.derivatives(x[s], 1, d);
    v.u[s] = d[0];
    v.ux[s] = d[1];
  }
  return v;
}

void check_inside(const Grid& g, const std::vector<double>& q, double t) {
  const double lim = trusted_half_length(g);
  for (double x : q)
    if (!(std::abs(x) <= lim))
      throw LocatedError(ErrorKind::flow_escaped,
                         "characteristic left the trusted region at t=" + std::to_string(t), x);
}

// Cumulative integral of uniformly spaced samples, fourth order at every index.
std::vector<double> cumulative(const std::vector<double>& f, double dt) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n < 4) {
    for (std::size_t k = 1; k < n; ++k) out[k] = out[k - 1] + 0.5 * dt * (f[k - 1] + f[k]);
    return out;
  }
  out[1] = dt * (9 * f[0] + 19 * f[1] - 5 * f[2] + f[3]) / 24.0;
  for (std::size_t k = 2; k < n; k += 2)
    out[k] = out[k - 2] + dt / 3.0 * (f[k - 2] + 4 * f[k - 1] + f[k]);
  for (std::size_t k = 3; k < n; k += 2)
    out[k] = out[k - 3] + 3.0 * dt / 8.0 * (f[k - 3] + 3 * f[k - 2] + 3 * f[k - 1] + f[k]);
  return out;
}

}  // namespace

FlowMap evolve_flow(const SeriesInterpolant& interp, const std::vector<double>& seeds) {
  FlowMap fm;
  fm.seeds = seeds;
  fm.times = interp.times();
  const std::size_t ns = seeds.size(), nt = fm.times.size();
  fm.q.assign(ns, std::vector<double>(nt));
  fm.qx.assign(ns, std::vector<double>(nt));
  fm.ux_along.assign(ns, std::vector<double>(nt));
  check_inside(interp.grid(), seeds, fm.times.front());

  std::vector<double> q = seeds, j(ns, 1.0);
  Velocity v0 = sample(interp, fm.times[0], q);
  for (std::size_t s = 0; s < ns; ++s) {
    fm.q[s][0] = q[s];
    fm.qx[s][0] = 1.0;
    fm.ux_along[s][0] = v0.ux[s];
  }
  std::vector<double> qs(ns), k1q(ns), k2q(ns), k3q(ns), k1j(ns), k2j(ns), k3j(ns);
  for (std::size_t k = 0; k + 1 < nt; ++k) {
    const double t0 = fm.times[k], d = fm.times[k + 1] - t0;
    // Stage 1 reuses the end-of-step sample from the previous interval.
    for (std::size_t s = 0; s < ns; ++s) {
      k1q[s] = v0.u[s];
      k1j[s] = v0.ux[s] * j[s];
      qs[s] = q[s] + 0.5 * d * k1q[s];
    }
    const Velocity v2 = sample(interp, t0 + 0.5 * d, qs);
    for (std::size_t s = 0; s < ns; ++s) {
      k2q[s] = v2.u[s];
      k2j[s] = v2.ux[s] * (j[s] + 0.5 * d * k1j[s]);
      qs[s] = q[s] + 0.5 * d * k2q[s];
    }
    const Velocity v3 = sample(interp, t0 + 0.5 * d, qs);
    for (std::size_t s = 0; s < ns; ++s) {
      k3q[s] = v3.u[s];
      k3j[s] = v3.ux[s] * (j[s] + 0.5 * d * k2j[s]);
      qs[s] = q[s] + d * k3q[s];
    }
    const Velocity v4 = sample(interp, t0 + d, qs);
    for (std::size_t s = 0; s < ns; ++s) {
      const double k4q = v4.u[s];
      const double k4j = v4.ux[s] * (j[s] + d * k3j[s]);
      q[s] += d / 6.0 * (k1q[s] + 2 * k2q[s] + 2 * k3q[s] + k4q);
      j[s] += d / 6.0 * (k1j[s] + 2 * k2j[s] + 2 * k3j[s] + k4j);
    }
    check_inside(interp.grid(), q, fm.times[k + 1]);
    v0 = sample(interp, fm.times[k + 1], q);
    for (std::size_t s = 0; s < ns; ++s) {
      fm.q[s][k + 1] = q[s];
      fm.qx[s][k + 1] = j[s];
      fm.ux_along[s][k + 1] = v0.ux[s];
    }
  }
  return fm;
}

FlowMap evolve_flow(const TimeSeries& series, const std::vector<double>& seeds) {
  return evolve_flow(SeriesInterpolant(series), seeds);
}

std::vector<std::vector<double>> qx_by_quadrature(const FlowMap& flow) {
  std::vector<std::vector<double>> out;
  if (flow.times.size() < 2) {
    out.assign(flow.seeds.size(), std::vector<double>(flow.times.size(), 1.0));
    return out;
  }
  const double dt = flow.times[1] - flow.times[0];
  for (const auto& ux : flow.ux_along) {
    std::vector<double> c = cumulative(ux, dt);
    for (double& v : c) v = std::exp(v);
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<std::vector<double>> conjugation_invariant(const TimeSeries& series, const FlowMap& flow) {
  const std::size_t ns = flow.seeds.size(), nt = flow.times.size();
  if (nt != series.snapshots.size())
    throw Error(ErrorKind::invalid_argument, "flow map and series have different time axes");
  std::vector<std::vector<double>> res(ns, std::vector<double>(nt));
  const SpectralInterpolant m0(series.initial().m());
  std::vector<double> m0s(ns);
  for (std::size_t s = 0; s < ns; ++s) m0s[s] = m0.value(flow.seeds[s]);
  for (std::size_t k = 0; k < nt; ++k) {
    if (k == 0) {
      for (std::size_t s = 0; s < ns; ++s) res[s][0] = 0.0;
      continue;
    }
    const SpectralInterpolant mk(series.snapshots[k].m());
    for (std::size_t s = 0; s < ns; ++s) {
      const double J = flow.qx[s][k];
      res[s][k] = mk.value(flow.q[s][k]) * J * J * J - m0s[s];
    }
  }
  return res;
}

SupportCurves support_curves(const TimeSeries& series, double a, double b) {
  if (!(a < b)) throw Error(ErrorKind::invalid_argument, "support curves need a < b");
  SupportCurves sc;
  sc.a = a;
  sc.b = b;
  sc.flow = evolve_flow(series, {a, b});
  sc.times = sc.flow.times;
  sc.gamma_minus = sc.flow.q[0];
  sc.gamma_plus = sc.flow.q[1];
  return sc;
}

double exterior_moment(const SolverState& state, double gamma_minus, double gamma_plus,
                       double weight_sign) {
  const Field& m = state.m();
  const Field w = Field::sample(m.grid(), [&](double x) { return std::exp(weight_sign * x); });
  return integrate(hadamard(w, m), gamma_minus, gamma_plus);
}

AsymptoticResidual asymptotic_metric_residual(const SolverState& state, const CoframeField& cf,
                                              const MetricField& mf, double gamma_minus,
                                              double gamma_plus) {
  const Grid& g = state.grid();
  const double lim = trusted_half_length(g);
  const double r_lo = gamma_plus + 1.0, r_hi = gamma_plus + 5.0;
  const double l_lo = gamma_minus - 5.0, l_hi = gamma_minus - 1.0;
  if (r_hi > lim || l_lo < -lim)
    throw Error(ErrorKind::domain_too_small, "asymptotic window leaves the trusted region");

  AsymptoticResidual out;
  // Right of the support u = (E/2) e^{-x} with E the e^{+x} moment of m.
  out.E = exterior_moment(state, gamma_minus, gamma_plus, 1.0);
  out.E_printed = exterior_moment(state, gamma_minus, gamma_plus, -1.0);
  const auto& p = cf.params();
  const double r = p.root();
  const double p11 = 4.0 * r * r;

  struct Rel {
    double g11, g12, g22;
  };
  auto relative = [&](double E) {
    const double E2 = E * E;
    double e11 = 0, e12 = 0, e22 = 0, s12 = 0, s22 = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.node(i);
      if (x < r_lo || x > r_hi) continue;
      const double p12 = 2.0 * p.sign * p.mu * r * E2 * std::exp(-2.0 * x);
      const double p22 = r * r * E2 * E2 * std::exp(-4.0 * x);
      e11 = std::max(e11, std::abs(mf.g11[i] - p11));
      e12 = std::max(e12, std::abs(mf.g12[i] - p12));
      e22 = std::max(e22, std::abs(mf.g22[i] - p22));
      s12 = std::max(s12, std::abs(p12));
      s22 = std::max(s22, std::abs(p22));
    }
    return Rel{e11 / p11, s12 > 0.0 ? e12 / s12 : e12, s22 > 0.0 ? e22 / s22 : e22};
  };
  const Rel a = relative(out.E);
  out.g11_rel = a.g11;
  out.g12_rel = a.g12;
  out.g22_rel = a.g22;
  out.right_res = std::max({a.g11, a.g12, a.g22});
  const Rel b = relative(out.E_printed);
  out.right_res_printed = std::max({b.g11, b.g12, b.g22});
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.node(i);
    if (x >= l_lo && x <= l_hi)
      out.left_res = std::max(out.left_res, std::abs(mf.g12[i]) + std::abs(mf.g22[i]));
  }
  return out;
}

}  // namespace dpgeo
