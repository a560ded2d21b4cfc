#include "dpgeo/immersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dpgeo {

const char* to_string(DerivativeConvention c) {
  return c == DerivativeConvention::d_dx ? "d/dx" : "d/dz";
}

void SecondFormParams::validate() const {
  if (!(sigma > 0.0)) throw Error(ErrorKind::invalid_argument, "second form needs sigma > 0");
  if (!(sigma * sigma > 4.0 * b0 * b0))
    throw Error(ErrorKind::invalid_argument, "second form needs sigma^2 > 4 b0^2");
  if (branch != 1 && branch != -1) throw Error(ErrorKind::invalid_argument, "branch must be +1 or -1");
}

ValidityInterval mu0_validity_interval(double sigma, double b0) {
  if (b0 == 0.0) return {-std::log(sigma) / 4.0, std::numeric_limits<double>::infinity()};
  const double root = std::sqrt(sigma * sigma - 4.0 * b0 * b0);
  const double den = 2.0 * b0 * b0;
  return {std::log(std::sqrt((sigma - root) / den)) / 2.0, std::log(std::sqrt((sigma + root) / den)) / 2.0};
}

SecondFormField second_form_mu0(const SecondFormParams& p, const Grid& grid) {
  p.validate();
  SecondFormField out;
  out.mu = 0.0;
  out.convention = p.convention;
  out.interval = mu0_validity_interval(p.sigma, p.b0);
  // c = a - kappa * a_x, kappa = 1/2 when the prime means d/dz with z = 2x.
  const double kappa = p.convention == DerivativeConvention::d_dz ? 0.5 : 1.0;
  const double s = p.branch;
  const double b02 = p.b0 * p.b0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    const double e4 = std::exp(4.0 * x), e8 = e4 * e4;
    const double L = p.sigma * e4 - b02 * e8 - 1.0;
    if (!(L > 0.0) || x <= out.interval.lo || x >= out.interval.hi) continue;
    const double Lx = 4.0 * p.sigma * e4 - 8.0 * b02 * e8;
    const double Lxx = 16.0 * p.sigma * e4 - 64.0 * b02 * e8;
    const double rl = std::sqrt(L);
    const double a = s * rl;
    const double ax = s * Lx / (2.0 * rl);
    const double axx = s * (Lxx / (2.0 * rl) - Lx * Lx / (4.0 * L * rl));
    out.nodes.push_back(i);
    out.x.push_back(x);
    out.a.push_back(a);
    out.b.push_back(-p.b0 * e4);
    out.c.push_back(a - kappa * ax);
    out.ax.push_back(ax);
    out.bx.push_back(-4.0 * p.b0 * e4);
    out.cx.push_back(ax - kappa * axx);
    out.delta.push_back(std::numeric_limits<double>::quiet_NaN());
  }
  if (out.nodes.empty())
    throw Error(ErrorKind::immersion_domain_boundary, "no grid node inside the validity interval");
  return out;
}

namespace {

struct OdeModel {
  double mu, b0, s, conv;

  double E(double x) const { return b0 * std::exp(4.0 * x); }
  double d(double b, double x) const { return (E(x) - (mu * mu - 1.0) * b) / mu; }
  double delta(double b, double x) const {
    const double dd = d(b, x);
    return dd * dd - 4.0 * (1.0 - b * b);
  }
  // b_x, or NaN when Delta <= 0 or the leading coefficient vanishes.
  double rhs(double b, double x) const {
    const double D = delta(b, x);
    if (!(D > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double sq = std::sqrt(D), e = E(x), m2 = mu * mu;
    const double Q = mu * (1.0 + m2) * sq + s * ((m2 + 1.0) * (m2 + 1.0) * b - (m2 - 1.0) * e);
    const double R = 2.0 * (-mu * (1.0 + m2) * sq - s * (m2 - 1.0) * e) * b + 2.0 * s * e * e;
    if (Q == 0.0) return std::numeric_limits<double>::quiet_NaN();
    return conv * (-R / Q);
  }
};

bool rk4(const OdeModel& m, double x, double b, double h, double& out) {
  const double k1 = m.rhs(b, x);
  const double k2 = m.rhs(b + 0.5 * h * k1, x + 0.5 * h);
  const double k3 = m.rhs(b + 0.5 * h * k2, x + 0.5 * h);
  const double k4 = m.rhs(b + h * k3, x + h);
  out = b + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  return std::isfinite(out) && m.delta(out, x + h) > 0.0;
}

// Advances b over [x, x + h] with step-doubling error control and halving.
bool advance(const OdeModel& m, double x, double b, double h, int depth, double& out) {
  double full = 0, half = 0, two = 0;
  const bool ok_full = rk4(m, x, b, h, full);
  const bool ok_half = rk4(m, x, b, 0.5 * h, half) && rk4(m, x + 0.5 * h, half, 0.5 * h, two);
  if (ok_full && ok_half && std::abs(full - two) <= 1e-12 * (1.0 + std::abs(two))) {
    out = two + (two - full) / 15.0;
    return m.delta(out, x + h) > 0.0;
  }
  if (depth >= 14) {
    if (ok_half) {
      out = two;
      return true;
    }
    return false;
  }
  double mid = 0;
  if (!advance(m, x, b, 0.5 * h, depth + 1, mid)) return false;
  return advance(m, x + 0.5 * h, mid, 0.5 * h, depth + 1, out);
}

}  // namespace

SecondFormField second_form_ode(const SecondFormParams& p, const Grid& grid, double mu) {
  if (mu == 0.0) throw Error(ErrorKind::invalid_argument, "second_form_ode needs mu != 0");
  if (!(p.x_end > p.x_begin)) throw Error(ErrorKind::invalid_argument, "ODE interval is empty");
  if (p.branch != 1 && p.branch != -1) throw Error(ErrorKind::invalid_argument, "branch must be +1 or -1");
  const OdeModel model{mu, p.b0, static_cast<double>(p.branch),
                       p.convention == DerivativeConvention::d_dz ? 2.0 : 1.0};
  const double h = grid.spacing();
  std::size_t i = grid.floor_index(p.x_begin);
  if (grid.node(i) < p.x_begin) ++i;
  if (i >= grid.size() || grid.node(i) > p.x_end)
    throw Error(ErrorKind::invalid_argument, "ODE interval contains no grid node");
  SecondFormField out;
  out.mu = mu;
  out.convention = p.convention;
  double x = grid.node(i), b = p.b_init;
  if (!(model.delta(b, x) > 0.0))
    throw LocatedError(ErrorKind::immersion_domain_boundary, "Delta <= 0 at the initial point", x);
  const double m2 = mu * mu;
  auto record = [&](std::size_t node, double xx, double bb) {
    const double bx = model.rhs(bb, xx);
    const double D = model.delta(bb, xx);
    const double sq = p.branch * std::sqrt(D);
    const double dd = model.d(bb, xx);
    const double ddx = (4.0 * model.E(xx) - (m2 - 1.0) * bx) / mu;
    const double Dx = 2.0 * dd * ddx + 8.0 * bb * bx;
    const double sqx = p.branch * Dx / (2.0 * std::sqrt(D));
    out.nodes.push_back(node);
    out.x.push_back(xx);
    out.b.push_back(bb);
    out.bx.push_back(bx);
    out.a.push_back(0.5 * (sq + dd));
    out.c.push_back(0.5 * (sq - dd));
    out.ax.push_back(0.5 * (sqx + ddx));
    out.cx.push_back(0.5 * (sqx - ddx));
    out.delta.push_back(D);
  };
  record(i, x, b);
  while (i + 1 < grid.size() && grid.node(i + 1) <= p.x_end + 1e-12) {
    double next = 0;
    if (!advance(model, x, b, h, 0, next) || !std::isfinite(model.rhs(next, x + h))) {
      out.boundary = x;
      break;
    }
    ++i;
    x = grid.node(i);
    b = next;
    record(i, x, b);
  }
  out.interval = {out.x.front(), out.x.back()};
  return out;
}

BonnetReport bonnet_residuals(const SolutionJet& jet, const CoframeField& cf,
                              const SecondFormField& sff, double mask_tol) {
  const CoframeDerivatives d = coframe_derivatives(jet, cf.params());
  const double fmax = cf.f12().sup_norm();
  BonnetReport rep;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rep.codazzi1_at.assign(sff.size(), nan);
  rep.codazzi2_at.assign(sff.size(), nan);
  rep.gauss_scalar_at.assign(sff.size(), nan);
  for (std::size_t k = 0; k < sff.size(); ++k) {
    const std::size_t i = sff.nodes[k];
    const double gs = sff.a[k] * sff.c[k] - sff.b[k] * sff.b[k] + 1.0;
    rep.gauss_scalar_at[k] = gs;
    if (!(std::abs(cf.f12()[i]) > mask_tol * fmax)) continue;
    ++rep.points;
    const double a = sff.a[k], b = sff.b[k], c = sff.c[k];
    const double f11 = cf.f11()[i], f12 = cf.f12()[i], f21 = cf.f21()[i], f22 = cf.f22()[i];
    const double f31 = cf.f31()[i], f32 = cf.f32()[i];
    const double h11 = a * f11 + b * f21, h12 = a * f12 + b * f22;
    const double k11 = b * f11 + c * f21, k12 = b * f12 + c * f22;
    const double dx_h12 = sff.ax[k] * f12 + a * d.dx_f12[i] + sff.bx[k] * f22 + b * d.dx_f22[i];
    const double dt_h11 = a * d.dt_f11[i] + b * d.dt_f21[i];
    const double dx_k12 = sff.bx[k] * f12 + b * d.dx_f12[i] + sff.cx[k] * f22 + c * d.dx_f22[i];
    const double dt_k11 = b * d.dt_f11[i] + c * d.dt_f21[i];
    const double sym = (f11 * h12 - f12 * h11) + (f21 * k12 - f22 * k11);
    const double c1 = dx_h12 - dt_h11 - (f31 * k12 - f32 * k11);
    const double c2 = dx_k12 - dt_k11 + (f31 * h12 - f32 * h11);
    const double gf = (d.dx_f32[i] - d.dt_f31[i]) + (h11 * k12 - h12 * k11);
    rep.codazzi1_at[k] = c1;
    rep.codazzi2_at[k] = c2;
    rep.symmetry = std::max(rep.symmetry, std::abs(sym));
    rep.codazzi1 = std::max(rep.codazzi1, std::abs(c1));
    rep.codazzi2 = std::max(rep.codazzi2, std::abs(c2));
    rep.gauss_form = std::max(rep.gauss_form, std::abs(gf));
    rep.gauss_scalar = std::max(rep.gauss_scalar, std::abs(gs));
  }
  if (rep.points == 0)
    throw Error(ErrorKind::degenerate_everywhere,
                "second form interval does not meet the non-degenerate region");
  return rep;
}

BonnetReport bonnet_residuals(const SolverState& state, const CoframeField& cf,
                              const SecondFormField& sff, double mask_tol) {
  return bonnet_residuals(make_jet(state), cf, sff, mask_tol);
}

ConventionVerdict resolve_convention(const SolverState& reference, SecondFormParams params,
                                     double mu, int sign) {
  const SolutionJet jet = make_jet(reference);
  const CoframeField cf = coframe(jet, CoframeParams{mu, sign});
  auto score = [&](DerivativeConvention c) {
    params.convention = c;
    try {
      const SecondFormField sff = mu == 0.0 ? second_form_mu0(params, reference.grid())
                                            : second_form_ode(params, reference.grid(), mu);
      const BonnetReport r = bonnet_residuals(jet, cf, sff);
      if (r.points == 0) return std::numeric_limits<double>::infinity();
      return std::max({r.gauss_scalar, r.codazzi1, r.codazzi2});
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  ConventionVerdict v;
  v.score_dx = score(DerivativeConvention::d_dx);
  v.score_dz = score(DerivativeConvention::d_dz);
  if (std::isinf(v.score_dx) && std::isinf(v.score_dz))
    throw Error(ErrorKind::immersion_domain_boundary,
                "neither derivative convention yields an evaluable second form");
  v.chosen = v.score_dz <= v.score_dx ? DerivativeConvention::d_dz : DerivativeConvention::d_dx;
  return v;
}

}  // namespace dpgeo
