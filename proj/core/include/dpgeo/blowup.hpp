#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpgeo/characteristics.hpp"
#include "dpgeo/dp_solver.hpp"

namespace dpgeo {

struct SignReport {
  bool passed = true;
  std::vector<std::string> violations;
  std::optional<double> offending_x;
  double I0 = 0.0;
  double g0 = 0.0;
};

// m0 >= 0 left of x0 and m0 <= 0 right of x0, up to tol.
SignReport check_sign_conditions(const Field& m0, double x0, double tol = 1e-12);

struct BlowupSample {
  double t = 0.0;
  double q = 0.0;
  double I = 0.0;         // exp(q) int_q^L exp(-z) m dz
  double I_point = 0.0;   // (u + u_x)(q), same quantity through the Green representation
  double g = 0.0;         // (u - u_x)(q)
  double f = 0.0;         // g^2
  double g22 = 0.0;       // (1 + mu^2) f^2
  double g12 = 0.0;       // sign 2 mu sqrt(1+mu^2) f
  double m_along = 0.0;   // m(q, t)
};

struct BlowupCertificate {
  double x0 = 0.0;
  double I0 = 0.0;
  double g0 = 0.0;
  double T0 = 0.0;
  double mu = 0.0;
  int sign = 1;
  std::vector<BlowupSample> trajectory;
};

// Throws certificate_invalid when the sign test fails or I0 >= 0 or g0 <= 0.
BlowupCertificate make_blowup_certificate(const Field& m0, double x0, double mu = 0.0, int sign = 1);

BlowupCertificate blowup_track(const TimeSeries& series, BlowupCertificate cert);

struct RiccatiReport {
  bool passed = false;
  bool riccati_ok = true;            // f' >= (-I0) f^2 on difference quotients
  double worst_riccati_gap = 0.0;    // min over steps of quotient - (-I0) f^2 (normalized)
  bool bound_ok = true;              // 0 < 1/f - I0 t <= 1/f(0)
  double worst_bound_excess = 0.0;   // max of (1/f - I0 t) - 1/f(0)
  bool I_decreasing_negative = true;
  bool g_nondecreasing = true;
  bool g12_zero_at_mu0 = true;
  bool exponential_growth_ok = true; // f(t) >= f(0) exp(-I0 t)
  double max_g22 = 0.0;
  double max_abs_m_along = 0.0;
  std::optional<double> threshold_cross_time;
  bool crossed_before_T0 = false;
  std::vector<std::string> violations;
};

RiccatiReport verify_riccati_bound(const BlowupCertificate& cert, double threshold = 1e6,
                                   double tol = 1e-8);

struct AppendixReport {
  double t = 0.0;
  double q = 0.0;
  double M = 0.0;  // (u - u_x)(q)
  double I = 0.0;  // (u + u_x)(q)
  double lhs1 = 0.0, rhs1 = 0.0;  // exp(-q) int_{-L}^q exp(z)(u^2-u_x^2) >= u^2 - u_x^2 at q
  double lhs2 = 0.0, rhs2 = 0.0;  // int_q^L exp(-x)(u^2-u_x^2) >= exp(-q) M I
  bool holds1 = false, holds2 = false;
  bool strict1 = false, strict2 = false;
};

AppendixReport verify_appendix_inequalities(const SolverState& state, double q);

struct GlobalCertificate {
  int m0_sign = 1;
  double l1_mass = 0.0;
  std::vector<double> times;
  std::vector<double> sup_ux;
  std::vector<double> sup_u;
  std::vector<double> l1_m;
  std::vector<double> min_signed_m;  // min over x of m0_sign * m
};

// Throws certificate_invalid if m0 is not one-signed within 1e-12.
GlobalCertificate make_global_certificate(const Field& m0);

struct GlobalReport {
  bool passed = true;
  double max_ux_excess = 0.0;  // max over snapshots of sup|u_x| - L1 mass
  double max_u_excess = 0.0;
  double max_l1_drift = 0.0;
  double worst_sign = 0.0;     // min of m0_sign * m over all snapshots
  bool stop_triggered = false;
  std::vector<std::string> violations;
};

GlobalReport verify_global_bound(const TimeSeries& series, GlobalCertificate& cert,
                                 double sign_floor = 1e-8);

}  // namespace dpgeo
