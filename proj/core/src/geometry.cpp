#include "dpgeo/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dpgeo {

void CoframeParams::validate() const {
  if (sign != 1 && sign != -1) throw Error(ErrorKind::invalid_argument, "coframe sign must be +1 or -1");
  if (!std::isfinite(mu)) throw Error(ErrorKind::invalid_argument, "coframe mu must be finite");
}

double CoframeParams::root() const { return std::sqrt(1.0 + mu * mu); }

Field wedge_factor(const Field& u) {
  const Field ux = deriv(u, 1);
  const Field uxx = deriv(u, 2);
  return dealiased_product(ux, ux) - 2.0 * dealiased_product(u, ux) + dealiased_product(u, uxx);
}

SolutionJet make_jet(const SolverState& state, const Field& u_t) {
  const Field& u = state.u();
  Field F = wedge_factor(u);
  Field Fx = deriv(F, 1);
  return SolutionJet{u,        deriv(u, 1), deriv(u, 2),    deriv(u, 3), state.m(),
                     std::move(F), std::move(Fx), u_t, momentum(u_t)};
}

SolutionJet make_jet(const SolverState& state) {
  RhsOptions opt;
  opt.check_edges = false;
  return make_jet(state, dp_rhs(state.u(), opt));
}

CoframeField::CoframeField(const Field& m, const Field& F, const CoframeParams& params)
    : params_(params),
      f11_(m),
      f12_(F),
      f21_(params.mu * m + params.sign * 2.0 * params.root()),
      f22_(params.mu * F),
      f31_(params.sign * params.root() * m + 2.0 * params.mu),
      f32_(params.sign * params.root() * F) {
  params.validate();
  require_same_grid(m, F, "coframe");
}

CoframeField coframe(const SolutionJet& jet, const CoframeParams& params) {
  return CoframeField(jet.m, jet.F, params);
}

CoframeField coframe(const SolverState& state, const CoframeParams& params) {
  return CoframeField(state.m(), wedge_factor(state.u()), params);
}

CoframeDerivatives coframe_derivatives(const SolutionJet& jet, const CoframeParams& p) {
  const double sr = p.sign * p.root();
  return CoframeDerivatives{jet.mt, p.mu * jet.mt, sr * jet.mt,
                            jet.Fx, p.mu * jet.Fx, sr * jet.Fx};
}

Field wedge_density(const CoframeField& cf) {
  return hadamard(cf.f11(), cf.f22()) - hadamard(cf.f12(), cf.f21());
}

Field wedge_identity_residual(const CoframeField& cf) {
  const auto& p = cf.params();
  return wedge_density(cf) + (p.sign * 2.0 * p.root()) * cf.f12();
}

MetricField metric(const CoframeField& cf) {
  MetricField g{hadamard(cf.f11(), cf.f11()) + hadamard(cf.f21(), cf.f21()),
                hadamard(cf.f11(), cf.f12()) + hadamard(cf.f21(), cf.f22()),
                hadamard(cf.f12(), cf.f12()) + hadamard(cf.f22(), cf.f22()),
                {}};
  g.positive_definite.resize(g.g11.size());
  for (std::size_t i = 0; i < g.g11.size(); ++i) {
    const double det = g.g11[i] * g.g22[i] - g.g12[i] * g.g12[i];
    g.positive_definite[i] = g.g11[i] > 0.0 && det > 0.0;
  }
  return g;
}

double StructureResiduals::sup() const {
  return std::max({r1.sup_norm(), r2.sup_norm(), r3.sup_norm()});
}

StructureResiduals structure_residuals(const SolutionJet& jet, const CoframeField& cf) {
  const CoframeDerivatives d = coframe_derivatives(jet, cf.params());
  const Field w13 = hadamard(cf.f11(), cf.f32()) - hadamard(cf.f12(), cf.f31());
  const Field w32 = hadamard(cf.f31(), cf.f22()) - hadamard(cf.f32(), cf.f21());
  const Field w12 = hadamard(cf.f11(), cf.f22()) - hadamard(cf.f12(), cf.f21());
  return StructureResiduals{d.dx_f12 - d.dt_f11 - w32, d.dx_f22 - d.dt_f21 - w13,
                            d.dx_f32 - d.dt_f31 - w12};
}

StructureResiduals structure_residuals(const SolverState& state, const CoframeField& cf) {
  return structure_residuals(make_jet(state), cf);
}

CurvatureField gauss_curvature(const SolutionJet& jet, const CoframeField& cf, double mask_tol) {
  const CoframeDerivatives d = coframe_derivatives(jet, cf.params());
  const Field w = wedge_density(cf);
  const double wmax = w.sup_norm();
  CurvatureField out;
  out.K.assign(w.size(), std::numeric_limits<double>::quiet_NaN());
  out.unmasked.assign(w.size(), false);
  if (wmax == 0.0)
    throw Error(ErrorKind::degenerate_everywhere, "wedge density vanishes on the whole grid");
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (std::abs(w[i]) <= mask_tol * wmax) continue;
    out.unmasked[i] = true;
    ++out.unmasked_count;
    out.K[i] = -(d.dx_f32[i] - d.dt_f31[i]) / w[i];
    out.sup_deviation = std::max(out.sup_deviation, std::abs(out.K[i] + 1.0));
  }
  if (out.unmasked_count == 0)
    throw Error(ErrorKind::degenerate_everywhere, "every node is masked");
  return out;
}

CurvatureField gauss_curvature(const SolverState& state, const CoframeField& cf, double mask_tol) {
  return gauss_curvature(make_jet(state), cf, mask_tol);
}

std::vector<Interval> pss_region(const CoframeField& cf, double tol) {
  const Field& F = cf.f12();
  const double fmax = F.sup_norm();
  std::vector<Interval> out;
  if (fmax == 0.0) return out;
  const double cut = tol * fmax;
  const Grid& g = F.grid();
  bool open = false;
  Interval cur;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const bool in = std::abs(F[i]) > cut;
    if (in && !open) {
      cur.first = i;
      open = true;
    }
    if (!in && open) {
      cur.last = i - 1;
      cur.x_lo = g.node(cur.first);
      cur.x_hi = g.node(cur.last);
      out.push_back(cur);
      open = false;
    }
  }
  if (open) {
    cur.last = F.size() - 1;
    cur.x_lo = g.node(cur.first);
    cur.x_hi = g.node(cur.last);
    out.push_back(cur);
  }
  return out;
}

}  // namespace dpgeo
