#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "dpgeo/dp_solver.hpp"
#include "dpgeo/geometry.hpp"

namespace dpgeo {

using Mat2 = Eigen::Matrix2d;

struct MatrixField {
  std::vector<Mat2> values;
  std::size_t size() const { return values.size(); }
  double sup_entry() const;  // max |entry| over all points
};

// theta_1 = -2 dx, theta_2 = theta_3 = (1 + m/2) dx + F/2 dt
struct ThetaTriad {
  Field t11, t12, t21, t22, t31, t32;
};

ThetaTriad theta_triad(const SolverState& state);
ThetaTriad theta_triad(const Field& m, const Field& F);
// d theta_2 - theta_1 ^ theta_3 coefficient: (F_x - m_t)/2 + F
Field theta_structure_residual(const SolutionJet& jet);

// Applies the 3x3 map taking (theta_1, theta_2, theta_3) to (omega_1, omega_2, omega_3);
// returns the sup difference over both coefficient slots.
double triad_transform_check(const CoframeField& cf, const ThetaTriad& th);

// m_t - F_x - 2F, the compatibility condition of the gamma-bar system.
Field pseudo_potential_residual(const SolverState& state);
Field pseudo_potential_residual(const SolutionJet& jet);

// 2 gb_x = 4 gb + gb^2 (m + 2) integrated node by node from x_start to the
// right end of the trusted region. Switches to w = 1/gb when |gb| > 1.
struct GammaBarProfile {
  std::vector<std::size_t> nodes;
  std::vector<double> x;
  std::vector<double> values;
  std::vector<double> slopes;        // gb_x from the Riccati right-hand side
  std::optional<double> pole;        // location where |gb| exceeded 1e8
  std::size_t refined_steps = 0;      // cells that needed the finest substep
  std::size_t unconverged_steps = 0;  // cells where even that missed the tolerance
};

GammaBarProfile gamma_bar_integrate(const Field& m, double gamma0, double x_start,
                                    std::optional<double> x_stop = std::nullopt);
GammaBarProfile gamma_bar_integrate(const SolverState& state, double gamma0, double x_start,
                                    std::optional<double> x_stop = std::nullopt);

// 2 gb_t = gb^2 F(x, t) at fixed x from t0 to t1.
double gamma_bar_t_integrate(const SeriesInterpolant& interp, double x, double t0, double t1,
                             double gamma0, int steps_per_interval = 4);

// Distance to the pole for constant m + 2 = c > 0 starting from gamma0 > 0.
double riccati_pole_distance(double c, double gamma0);

struct PathConsistency {
  double x_then_t = 0.0;
  double t_then_x = 0.0;
  double difference = 0.0;
};

PathConsistency gamma_bar_two_paths(const TimeSeries& series, const SeriesInterpolant& interp,
                                    std::size_t k0, std::size_t k1, double x1, double x2,
                                    double gamma0);

struct ConservationReading {
  std::string name;
  bool theta1_as_printed = false;  // zeta (m - 2) gamma - m, else gamma (m + 2)/zeta - m
  int theta2_uuxx_sign = -1;       // sign in front of u u_xx in theta_2
  double drift = 0.0;              // max |int theta_1 (t) - int theta_1 (0)| / elapsed time
  double local_residual = 0.0;     // sup |d_t theta_1 - d_x theta_2| (interior snapshots)
  bool satisfied = false;
};

struct ConservationReport {
  double zeta = 1.0;
  std::vector<ConservationReading> readings;
  std::string verdict;  // names of satisfied readings, comma separated
  double e1_drift = 0.0;
};

ConservationReport conservation_law_check(const TimeSeries& series, double zeta,
                                          double drift_tol = 1e-5, double local_tol = 1e-2);

// X = 1/2 [[f21, f11 - f31], [f11 + f31, -f21]], T the same with the dt coefficients.
struct ZcrField {
  MatrixField X, T;
};

ZcrField zcr_matrices(const CoframeField& cf);
ZcrField zcr_matrices(const ThetaTriad& th);
// Closed-form matrices as printed for the mu-family and for the theta triad.
ZcrField printed_zcr(const Field& m, const Field& F, double mu, int sign);
ZcrField printed_zcr_bar(const Field& m, const Field& F);
double zcr_difference(const ZcrField& a, const ZcrField& b);

// d_t X - d_x T + [X, T] with d_t through the chain rule.
MatrixField zcr_residual(const SolutionJet& jet, const CoframeField& cf);
// Same for the theta triad matrices.
MatrixField zcr_residual_bar(const SolutionJet& jet);

// Printed gauge matrix S for the given branch at momentum value m.
Mat2 gauge_matrix(double mu, int branch, double m);

struct GaugeReport {
  double x_residual = 0.0;         // sup || S X S^-1 - Xbar ||
  double t_residual = 0.0;         // sup || S T S^-1 - Tbar ||
  double scaled_x_residual = 0.0;  // same with lambda S
  double scaled_t_residual = 0.0;
  double min_abs_det = 0.0;
  std::optional<double> singular_at;
  double derivative_mismatch = 0.0;  // sup || d_t Xbar - S (d_t X) S^-1 ||
};

GaugeReport gauge_conjugation_check(const SolverState& state, double mu, int branch,
                                    double lambda = 2.5);
GaugeReport gauge_conjugation_check(const SolutionJet& jet, double mu, int branch,
                                    double lambda = 2.5);

}  // namespace dpgeo
