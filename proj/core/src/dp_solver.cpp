#include "dpgeo/dp_solver.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>

#include "dpgeo/quadrature.hpp"

namespace dpgeo {

void SolverConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorKind::config_error, "dt must be positive");
  if (!(t_end > 0.0) || !std::isfinite(t_end))
    throw Error(ErrorKind::config_error, "t_end must be positive");
  if (!std::isfinite(stop.min_ux_floor) || !std::isfinite(stop.sup_ceiling))
    throw Error(ErrorKind::config_error, "stop thresholds must be finite");
  if (snapshot_stride == 0) throw Error(ErrorKind::config_error, "snapshot stride must be >= 1");
}

SolverState::SolverState(double t, Field u) : t_(t), u_(std::move(u)), m_(momentum(u_)) {}

std::vector<double> TimeSeries::times() const {
  std::vector<double> t;
  t.reserve(snapshots.size());
  for (const auto& s : snapshots) t.push_back(s.t());
  return t;
}

namespace {

void truncate_two_thirds(Spectrum& s) {
  const std::size_t kc = s.grid.size() / 3;
  for (std::size_t j = kc + 1; j < s.c.size(); ++j) s.c[j] = 0.0;
}

bool all_finite(const Field& f) {
  return std::all_of(f.values().begin(), f.values().end(), [](double v) { return std::isfinite(v); });
}

SnapshotLog make_log(const SolverState& s) {
  SnapshotLog row;
  row.t = s.t();
  const Field ux = deriv(s.u(), 1);
  auto it = std::min_element(ux.values().begin(), ux.values().end());
  row.min_ux = *it;
  row.min_ux_at = s.grid().node(static_cast<std::size_t>(it - ux.values().begin()));
  row.sup_u = s.u().sup_norm();
  row.e = conserved_quantities(s);
  row.edge = edge_level(s.u());
  return row;
}

}  // namespace

Field dp_rhs(const Field& u, const RhsOptions& opt) {
  if (opt.check_edges) check_edge_decay(u, opt.edge_tol, "dp_rhs");
  // u u_x = (u^2)_x / 2, so both terms act on the single product u^2.
  Field uf = u;
  if (opt.dealias) {
    Spectrum su = forward(u);
    truncate_two_thirds(su);
    uf = backward(su);
  }
  Spectrum sq = forward(hadamard(uf, uf));
  if (opt.dealias) truncate_two_thirds(sq);
  for (std::size_t j = 0; j < sq.c.size(); ++j) {
    const double k = sq.grid.wavenumber(j);
    sq.c[j] *= Complex(0.0, -k * (0.5 + 1.5 / (1.0 + k * k)));
  }
  sq.c[u.size() / 2] = 0.0;
  return backward(sq);
}

SolverState step(const SolverState& state, double dt, bool dealias) {
  if (!(dt > 0.0)) throw Error(ErrorKind::invalid_argument, "step needs dt > 0");
  RhsOptions opt;
  opt.dealias = dealias;
  opt.check_edges = false;
  const Field& u = state.u();
  const Field k1 = dp_rhs(u, opt);
  const Field k2 = dp_rhs(u + (0.5 * dt) * k1, opt);
  const Field k3 = dp_rhs(u + (0.5 * dt) * k2, opt);
  const Field k4 = dp_rhs(u + dt * k3, opt);
  Field next = u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (!all_finite(next))
    throw BlowupDetected("non-finite values after step at t=" + std::to_string(state.t()), state);
  return SolverState(state.t() + dt, std::move(next));
}

TimeSeries run(const Field& u0, const SolverConfig& cfg) {
  cfg.validate();
  check_edge_decay(u0, cfg.edge_tol, "run: initial datum");
  auto n_steps = static_cast<std::size_t>(std::llround(cfg.t_end / cfg.dt));
  if (n_steps == 0) n_steps = 1;
  double dt = cfg.dt;
  if (std::abs(static_cast<double>(n_steps) * cfg.dt - cfg.t_end) > 1e-9 * cfg.t_end) {
    n_steps = static_cast<std::size_t>(std::ceil(cfg.t_end / cfg.dt));
    dt = cfg.t_end / static_cast<double>(n_steps);
  }
  if (n_steps % cfg.snapshot_stride != 0)
    throw Error(ErrorKind::config_error, "snapshot stride must divide the number of steps");

  TimeSeries ts;
  ts.dt = dt;
  ts.stride = cfg.snapshot_stride;
  SolverState state(0.0, u0);
  ts.snapshots.push_back(state);
  ts.log.push_back(make_log(state));
  ts.max_edge_level = ts.log.back().edge;

  for (std::size_t n = 1; n <= n_steps; ++n) {
    try {
      SolverState next = step(state, dt, cfg.dealias);
      // Re-anchor t on the lattice to avoid accumulated rounding.
      state = SolverState(static_cast<double>(n) * dt, next.u());
    } catch (const BlowupDetected& e) {
      ts.status = RunStatus::blow_up_detected;
      const SnapshotLog row = make_log(e.last_valid());
      ts.stop = StopInfo{e.last_valid().t(), row.min_ux_at, "non-finite values"};
      ts.last_valid = e.last_valid();
      spdlog::info("run stopped at t={}: non-finite values", e.last_valid().t());
      return ts;
    }
    const Field ux = deriv(state.u(), 1);
    const auto it = std::min_element(ux.values().begin(), ux.values().end());
    const double sup_u = state.u().sup_norm();
    const bool steep = *it < -cfg.stop.min_ux_floor;
    const bool large = sup_u > cfg.stop.sup_ceiling;
    const bool stored = n % cfg.snapshot_stride == 0;
    if (stored) {
      ts.snapshots.push_back(state);
      ts.log.push_back(make_log(state));
      ts.max_edge_level = std::max(ts.max_edge_level, ts.log.back().edge);
    }
    if (std::isfinite(cfg.stop.spectral_tail) && stored) {
      const double tail = spectral_tail(state.u());
      if (tail > cfg.stop.spectral_tail) {
        ts.status = RunStatus::resolution_lost;
        ts.stop = StopInfo{state.t(), state.grid().node(static_cast<std::size_t>(it - ux.values().begin())),
                           "spectral tail above threshold"};
        ts.last_valid = state;
        spdlog::info("run stopped at t={}: spectral tail {:.2e}", state.t(), tail);
        return ts;
      }
    }
    if (steep || large) {
      ts.status = RunStatus::blow_up_detected;
      const double where = state.grid().node(static_cast<std::size_t>(it - ux.values().begin()));
      ts.stop = StopInfo{state.t(), where, steep ? "min u_x below floor" : "sup |u| above ceiling"};
      ts.last_valid = state;
      spdlog::info("run stopped at t={} x={}: {}", state.t(), where, ts.stop->reason);
      return ts;
    }
  }
  if (ts.max_edge_level > cfg.edge_tol)
    spdlog::warn("edge level reached {:.3e} during the run (tolerance {:.1e})", ts.max_edge_level,
                 cfg.edge_tol);
  return ts;
}

Conserved conserved_quantities(const SolverState& state) {
  const Field& u = state.u();
  const Field& m = state.m();
  const Field v = helmholtz_inverse(u, 4.0);
  Conserved c;
  c.e1 = riemann_sum(m);
  c.e2 = riemann_sum(hadamard(m, v));
  c.e3 = riemann_sum(hadamard(hadamard(u, u), u));
  return c;
}

double spectral_tail(const Field& u) {
  const Spectrum s = forward(u);
  const std::size_t kc = u.size() / 3;
  const std::size_t band = std::max<std::size_t>(1, u.size() / 24);
  double top = 0.0, tail = 0.0;
  for (std::size_t j = 0; j <= kc; ++j) {
    const double a = std::abs(s.c[j]);
    top = std::max(top, a);
    if (j + band >= kc) tail = std::max(tail, a);
  }
  return top > 0.0 ? tail / top : 0.0;
}

double e2_by_kernel(const SolverState& state) {
  const Field v = helmholtz_kernel_convolution(state.u(), 4.0, 1e-6);
  return riemann_sum(hadamard(state.m(), v));
}

Field local_form_residual(const SolverState& state, const Field& u_t) {
  const Field& u = state.u();
  const Field ux = deriv(u, 1);
  const Field uxx = deriv(u, 2);
  const Field uxxx = deriv(u, 3);
  const Field utxx = deriv(u_t, 2);
  return u_t - utxx + 4.0 * hadamard(u, ux) - 3.0 * hadamard(ux, uxx) - hadamard(u, uxxx);
}

Field momentum_transport_residual(const SolverState& state) {
  RhsOptions opt;
  opt.check_edges = false;
  const Field mt = momentum(dp_rhs(state.u(), opt));
  const Field& m = state.m();
  return mt + hadamard(state.u(), deriv(m, 1)) + 3.0 * hadamard(deriv(state.u(), 1), m);
}

SeriesInterpolant::SeriesInterpolant(const TimeSeries& series)
    : grid_(series.initial().grid()), times_(series.times()) {
  if (times_.size() < 2) throw Error(ErrorKind::invalid_argument, "need at least two snapshots");
  RhsOptions opt;
  opt.check_edges = false;
  for (const auto& s : series.snapshots) {
    u_.push_back(forward(s.u()));
    ut_.push_back(forward(dp_rhs(s.u(), opt)));
  }
}

std::size_t SeriesInterpolant::segment(double t) const {
  const double eps = 1e-12 * std::max(1.0, std::abs(times_.back()));
  if (t < times_.front() - eps || t > times_.back() + eps)
    throw Error(ErrorKind::invalid_argument, "time outside the stored series");
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t i = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  return std::min(i, times_.size() - 2);
}

Spectrum SeriesInterpolant::spectrum_at(double t) const {
  const std::size_t i = segment(t);
  const double t0 = times_[i], d = times_[i + 1] - t0;
  const double s = (t - t0) / d;
  const double h00 = (2 * s - 3) * s * s + 1, h10 = ((s - 2) * s + 1) * s;
  const double h01 = (3 - 2 * s) * s * s, h11 = (s - 1) * s * s;
  Spectrum out{grid_, std::vector<Complex>(u_[i].c.size())};
  for (std::size_t j = 0; j < out.c.size(); ++j)
    out.c[j] = h00 * u_[i].c[j] + h10 * d * ut_[i].c[j] + h01 * u_[i + 1].c[j] +
               h11 * d * ut_[i + 1].c[j];
  return out;
}

Spectrum SeriesInterpolant::rate_at(double t) const {
  const std::size_t i = segment(t);
  const double t0 = times_[i], d = times_[i + 1] - t0;
  const double s = (t - t0) / d;
  const double d00 = 6 * s * (s - 1) / d, d10 = (3 * s - 4) * s + 1;
  const double d01 = -6 * s * (s - 1) / d, d11 = (3 * s - 2) * s;
  Spectrum out{grid_, std::vector<Complex>(u_[i].c.size())};
  for (std::size_t j = 0; j < out.c.size(); ++j)
    out.c[j] = d00 * u_[i].c[j] + d10 * ut_[i].c[j] + d01 * u_[i + 1].c[j] + d11 * ut_[i + 1].c[j];
  return out;
}

}  // namespace dpgeo
