#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dpgeo/error.hpp"
#include "dpgeo/grid.hpp"
#include "dpgeo/spectral.hpp"

namespace dpgeo {

struct StopThresholds {
  double min_ux_floor = 1e3;  // stop when min u_x < -min_ux_floor
  double sup_ceiling = 1e6;   // stop when sup |u| > sup_ceiling
  // Stop when the relative spectral tail (see spectral_tail) exceeds this; off by default.
  double spectral_tail = INFINITY;
};

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  StopThresholds stop;
  bool dealias = true;
  std::size_t snapshot_stride = 1;
  double edge_tol = default_edge_tol;

  void validate() const;
};

class SolverState {
 public:
  SolverState(double t, Field u);

  double t() const { return t_; }
  const Field& u() const { return u_; }
  const Field& m() const { return m_; }
  const Grid& grid() const { return u_.grid(); }

 private:
  double t_;
  Field u_;
  Field m_;
};

struct Conserved {
  double e1 = 0.0;  // int m
  double e2 = 0.0;  // int m v, v = (4 - d^2)^{-1} u
  double e3 = 0.0;  // int u^3
};

struct SnapshotLog {
  double t = 0.0;
  double min_ux = 0.0;
  double min_ux_at = 0.0;
  double sup_u = 0.0;
  Conserved e;
  double edge = 0.0;
};

enum class RunStatus { completed, blow_up_detected, resolution_lost };

struct StopInfo {
  double t = 0.0;
  double location = 0.0;  // position of min u_x at the last valid state
  std::string reason;
};

class TimeSeries {
 public:
  std::vector<SolverState> snapshots;
  std::vector<SnapshotLog> log;  // one row per stored snapshot
  RunStatus status = RunStatus::completed;
  std::optional<StopInfo> stop;
  double dt = 0.0;
  std::size_t stride = 1;
  double max_edge_level = 0.0;
  // State that fired the stop criterion (finite, but not on the stride lattice).
  std::optional<SolverState> last_valid;

  const SolverState& initial() const { return snapshots.front(); }
  const SolverState& final_state() const { return snapshots.back(); }
  std::vector<double> times() const;
};

// Raised by step() when the stage values stop being finite; carries the input state.
class BlowupDetected : public Error {
 public:
  BlowupDetected(const std::string& what, SolverState last)
      : Error(ErrorKind::blow_up_detected, what), last_(std::move(last)) {}
  const SolverState& last_valid() const { return last_; }

 private:
  SolverState last_;
};

struct RhsOptions {
  bool dealias = true;
  bool check_edges = true;
  double edge_tol = default_edge_tol;
};

// u_t = -u u_x - 3/2 d/dx (1 - d^2)^{-1} (u^2)
Field dp_rhs(const Field& u, const RhsOptions& opt = {});
SolverState step(const SolverState& state, double dt, bool dealias = true);
TimeSeries run(const Field& u0, const SolverConfig& cfg);

Conserved conserved_quantities(const SolverState& state);
// max |c_j| over the top band just below the 2/3 cutoff, relative to max |c_j|.
double spectral_tail(const Field& u);
// E2 with v from the exp(-2|x|)/4 kernel instead of the spectral inverse.
double e2_by_kernel(const SolverState& state);

// u_t - u_txx + 4 u u_x - 3 u_x u_xx - u u_xxx
Field local_form_residual(const SolverState& state, const Field& u_t);
// m_t + u m_x + 3 u_x m with m_t from the chain rule through dp_rhs
Field momentum_transport_residual(const SolverState& state);

// Cubic Hermite interpolation in time between stored snapshots, carried out on
// the spectral coefficients of u with slopes u_t = dp_rhs(u).
class SeriesInterpolant {
 public:
  explicit SeriesInterpolant(const TimeSeries& series);

  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }
  const std::vector<double>& times() const { return times_; }
  const Grid& grid() const { return grid_; }

  Spectrum spectrum_at(double t) const;
  // Spectrum of u_t at time t (derivative of the Hermite interpolant).
  Spectrum rate_at(double t) const;
  Field u_at(double t) const { return backward(spectrum_at(t)); }

 private:
  Grid grid_;
  std::vector<double> times_;
  std::vector<Spectrum> u_;
  std::vector<Spectrum> ut_;
  std::size_t segment(double t) const;
};

}  // namespace dpgeo
