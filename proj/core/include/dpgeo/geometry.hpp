#pragma once

#include <vector>

#include "dpgeo/dp_solver.hpp"

namespace dpgeo {

struct CoframeParams {
  double mu = 0.0;
  int sign = 1;

  void validate() const;
  double root() const;  // sqrt(1 + mu^2)
};

// Spatial and chain-rule time derivatives of u needed by the geometric checks.
struct SolutionJet {
  Field u, ux, uxx, uxxx;
  Field m;
  Field F;   // u_x^2 - 2 u u_x + u u_xx (dealiased products)
  Field Fx;
  Field ut;
  Field mt;  // (1 - d^2) u_t
};

// u_t from dp_rhs (on-shell).
SolutionJet make_jet(const SolverState& state);
// Arbitrary u_t slot (off-shell checks).
SolutionJet make_jet(const SolverState& state, const Field& u_t);

Field wedge_factor(const Field& u);  // F with dealiased products

// omega_i = f_i1 dx + f_i2 dt
class CoframeField {
 public:
  CoframeField(const Field& m, const Field& F, const CoframeParams& params);

  const Field& f11() const { return f11_; }
  const Field& f12() const { return f12_; }
  const Field& f21() const { return f21_; }
  const Field& f22() const { return f22_; }
  const Field& f31() const { return f31_; }
  const Field& f32() const { return f32_; }
  const CoframeParams& params() const { return params_; }
  const Grid& grid() const { return f11_.grid(); }

 private:
  CoframeParams params_;
  Field f11_, f12_, f21_, f22_, f31_, f32_;
};

// d/dt of the dx-coefficients and d/dx of the dt-coefficients.
struct CoframeDerivatives {
  Field dt_f11, dt_f21, dt_f31;
  Field dx_f12, dx_f22, dx_f32;
};

struct MetricField {
  Field g11, g12, g22;
  std::vector<bool> positive_definite;
};

struct StructureResiduals {
  Field r1, r2, r3;
  double sup() const;
};

struct CurvatureField {
  std::vector<double> K;      // NaN where masked
  std::vector<bool> unmasked;
  double sup_deviation = 0.0; // sup |K + 1| on the unmasked set
  std::size_t unmasked_count = 0;
};

struct Interval {
  std::size_t first = 0;  // node indices, inclusive
  std::size_t last = 0;
  double x_lo = 0.0;
  double x_hi = 0.0;
};

CoframeField coframe(const SolverState& state, const CoframeParams& params);
CoframeField coframe(const SolutionJet& jet, const CoframeParams& params);
CoframeDerivatives coframe_derivatives(const SolutionJet& jet, const CoframeParams& params);

Field wedge_density(const CoframeField& cf);
// f11 f22 - f12 f21 + sign 2 sqrt(1+mu^2) F, pointwise
Field wedge_identity_residual(const CoframeField& cf);

MetricField metric(const CoframeField& cf);

StructureResiduals structure_residuals(const SolverState& state, const CoframeField& cf);
StructureResiduals structure_residuals(const SolutionJet& jet, const CoframeField& cf);

constexpr double default_mask_tol = 1e-3;

// Throws degenerate_everywhere when nothing survives the mask.
CurvatureField gauss_curvature(const SolverState& state, const CoframeField& cf,
                               double mask_tol = default_mask_tol);
CurvatureField gauss_curvature(const SolutionJet& jet, const CoframeField& cf,
                               double mask_tol = default_mask_tol);

// Maximal runs of nodes with |F| > tol * max|F|.
std::vector<Interval> pss_region(const CoframeField& cf, double tol = default_mask_tol);

}  // namespace dpgeo
