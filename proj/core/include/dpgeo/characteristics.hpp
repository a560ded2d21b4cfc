#pragma once

#include <vector>

#include "dpgeo/dp_solver.hpp"
#include "dpgeo/geometry.hpp"

namespace dpgeo {

// q(x, t) and q_x(x, t) over seeds x times; row-major [seed][time].
struct FlowMap {
  std::vector<double> seeds;
  std::vector<double> times;
  std::vector<std::vector<double>> q;
  std::vector<std::vector<double>> qx;
  std::vector<std::vector<double>> ux_along;  // u_x(q(x,t), t), for the quadrature route

  std::size_t seed_count() const { return seeds.size(); }
  std::size_t time_count() const { return times.size(); }
  bool monotone() const;  // strictly increasing in the seed and qx > 0 at every time
};

struct SupportCurves {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> times;
  std::vector<double> gamma_minus;
  std::vector<double> gamma_plus;
  FlowMap flow;
};

// Integrates q_t = u(q, t) and (q_x)_t = u_x(q, t) q_x with classical RK4, one
// step per stored snapshot interval, u from the Hermite-in-time interpolant.
FlowMap evolve_flow(const TimeSeries& series, const std::vector<double>& seeds);
FlowMap evolve_flow(const SeriesInterpolant& interp, const std::vector<double>& seeds);

// exp(int_0^t u_x(q(x,s), s) ds) by composite Simpson on the stored times.
std::vector<std::vector<double>> qx_by_quadrature(const FlowMap& flow);

// m(q(x,t), t) q_x^3 - m0(x); [seed][time]
std::vector<std::vector<double>> conjugation_invariant(const TimeSeries& series, const FlowMap& flow);

SupportCurves support_curves(const TimeSeries& series, double a, double b);

// int_{gamma-}^{gamma+} exp(weight_sign * x) m dx at the state's time.
double exterior_moment(const SolverState& state, double gamma_minus, double gamma_plus,
                       double weight_sign = 1.0);

struct AsymptoticResidual {
  double right_res = 0.0;  // relative sup error of (g11, g12, g22) on the right window
  double left_res = 0.0;   // sup |g12| + |g22| on the left window
  double g11_rel = 0.0;
  double g12_rel = 0.0;
  double g22_rel = 0.0;
  double E = 0.0;                  // e^{+x} moment, the coefficient of u = (E/2) e^{-x}
  double E_printed = 0.0;          // e^{-x} moment
  double right_res_printed = 0.0;  // right_res with E_printed in place of E
};

AsymptoticResidual asymptotic_metric_residual(const SolverState& state, const CoframeField& cf,
                                              const MetricField& mf, double gamma_minus,
                                              double gamma_plus);

}  // namespace dpgeo
