#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpgeo/geometry.hpp"

namespace dpgeo {

// How the printed derivative in the second-form formulas is read. The argument
// is z = 2x in both cases; the derivative is taken in x or in z.
enum class DerivativeConvention { d_dx, d_dz };

const char* to_string(DerivativeConvention c);

struct SecondFormParams {
  double sigma = 3.0;
  double b0 = 1.0;
  int branch = 1;  // sign in front of the square root
  // Used by the mu != 0 path only.
  double b_init = 0.0;
  double x_begin = 0.0;
  double x_end = 1.0;
  DerivativeConvention convention = DerivativeConvention::d_dz;

  void validate() const;
};

struct ValidityInterval {
  double lo = 0.0;
  double hi = 0.0;  // may be +inf
};

// Coefficients a, b, c on a run of consecutive grid nodes (time independent).
struct SecondFormField {
  double mu = 0.0;
  DerivativeConvention convention = DerivativeConvention::d_dz;
  std::vector<std::size_t> nodes;
  std::vector<double> x, a, b, c, ax, bx, cx, delta;
  ValidityInterval interval;             // analytic interval (mu = 0) or integrated range
  std::optional<double> boundary;        // where Delta reached 0 (mu != 0)
  std::size_t size() const { return x.size(); }
};

// {L > 0} with L = sigma e^{4x} - b0^2 e^{8x} - 1, in closed form.
ValidityInterval mu0_validity_interval(double sigma, double b0);

SecondFormField second_form_mu0(const SecondFormParams& params, const Grid& grid);
SecondFormField second_form_ode(const SecondFormParams& params, const Grid& grid, double mu);

struct BonnetReport {
  std::size_t points = 0;
  double symmetry = 0.0;
  double codazzi1 = 0.0;
  double codazzi2 = 0.0;
  double gauss_form = 0.0;   // d omega_3 + omega_13 ^ omega_23, coordinate coefficient
  double gauss_scalar = 0.0; // sup |ac - b^2 + 1|
  // Per evaluated node (same order as the second form field, NaN where masked).
  std::vector<double> codazzi1_at, codazzi2_at, gauss_scalar_at;
};

BonnetReport bonnet_residuals(const SolutionJet& jet, const CoframeField& cf,
                              const SecondFormField& sff, double mask_tol = default_mask_tol);
BonnetReport bonnet_residuals(const SolverState& state, const CoframeField& cf,
                              const SecondFormField& sff, double mask_tol = default_mask_tol);

struct ConventionVerdict {
  DerivativeConvention chosen = DerivativeConvention::d_dz;
  double score_dx = 0.0;  // max of Gauss scalar and Codazzi residuals
  double score_dz = 0.0;
};

// Evaluates both conventions against the Bonnet system on a reference snapshot
// and picks the smaller residual. mu = 0 uses the closed form, otherwise the ODE.
ConventionVerdict resolve_convention(const SolverState& reference, SecondFormParams params,
                                     double mu, int sign = 1);

}  // namespace dpgeo
