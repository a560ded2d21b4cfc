#include "dpgeo/integrability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "dpgeo/error.hpp"
#include "dpgeo/quadrature.hpp"
#include "dpgeo/spectral.hpp"

namespace dpgeo {

namespace {

Mat2 pack(double a1, double a2, double a3) {
  Mat2 out;
  out << 0.5 * a2, 0.5 * (a1 - a3), 0.5 * (a1 + a3), -0.5 * a2;
  return out;
}

MatrixField pack_field(const Field& a1, const Field& a2, const Field& a3) {
  MatrixField out;
  out.values.reserve(a1.size());
  for (std::size_t i = 0; i < a1.size(); ++i) out.values.push_back(pack(a1[i], a2[i], a3[i]));
  return out;
}

double sup_abs(const Mat2& a) { return a.cwiseAbs().maxCoeff(); }

Field minus_wedge_factor(const Field& u) {
  const Field ux = deriv(u, 1);
  const Field uxx = deriv(u, 2);
  return dealiased_product(ux, ux) - 2.0 * dealiased_product(u, ux) - dealiased_product(u, uxx);
}

// Riccati right-hand sides for gb and w = 1/gb, both already divided by 2.
double gb_rhs(double gb, double m) { return 2.0 * gb + 0.5 * gb * gb * (m + 2.0); }
double w_rhs(double w, double m) { return -2.0 * w - 0.5 * (m + 2.0); }

struct RiccatiState {
  bool inverted = false;  // value holds w = 1/gb
  double value = 0.0;

  double gb() const { return inverted ? 1.0 / value : value; }
  // Representation-independent distance; near |gb| = 1 either form is well scaled.
  double distance(const RiccatiState& o) const {
    return inverted == o.inverted ? std::abs(value - o.value) : std::abs(gb() - o.gb());
  }
  void normalize() {
    if (!inverted && std::abs(value) > 1.0) {
      inverted = true;
      value = 1.0 / value;
    } else if (inverted && std::abs(value) > 1.0) {
      inverted = false;
      value = 1.0 / value;
    }
  }
};

template <class MAt>
double rk4(bool inverted, double y, double dx, const MAt& m_at, double x0) {
  auto f = [&](double yy, double x) {
    return inverted ? w_rhs(yy, m_at(x)) : gb_rhs(yy, m_at(x));
  };
  const double k1 = f(y, x0);
  const double k2 = f(y + 0.5 * dx * k1, x0 + 0.5 * dx);
  const double k3 = f(y + 0.5 * dx * k2, x0 + 0.5 * dx);
  const double k4 = f(y + dx * k3, x0 + dx);
  return y + dx / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

constexpr double pole_level = 1e-8;
constexpr double step_tol = 1e-11;

struct StepOutcome {
  RiccatiState state;
  std::optional<double> pole;
};

// Advances over [x0, x0 + dx] in n equal substeps; sample(q) gives m at x0 + q*dx/(2n).
template <class Sample>
StepOutcome advance(RiccatiState s, double x0, double dx, int n, const Sample& sample) {
  const double sub = dx / n;
  for (int j = 0; j < n; ++j) {
    s.normalize();
    auto m_at = [&](double x) {
      const long q = std::lround((x - x0) / (0.5 * sub));
      return sample(q);
    };
    const double next = rk4(s.inverted, s.value, sub, m_at, x0 + j * sub);
    if (s.inverted && (next == 0.0 || (next > 0.0) != (s.value > 0.0) || std::abs(next) < pole_level))
      return {s, x0 + j * sub};
    s.value = next;
  }
  s.normalize();
  return {s, std::nullopt};
}

}  // namespace

double MatrixField::sup_entry() const {
  double out = 0.0;
  for (const auto& v : values) out = std::max(out, sup_abs(v));
  return out;
}

ThetaTriad theta_triad(const Field& m, const Field& F) {
  require_same_grid(m, F, "theta_triad");
  const Grid& g = m.grid();
  const Field a = 0.5 * m + 1.0;
  const Field b = 0.5 * F;
  return ThetaTriad{Field::constant(g, -2.0), Field::zeros(g), a, b, a, b};
}

ThetaTriad theta_triad(const SolverState& state) {
  return theta_triad(state.m(), wedge_factor(state.u()));
}

Field theta_structure_residual(const SolutionJet& jet) {
  return 0.5 * (jet.Fx - jet.mt) + jet.F;
}

double triad_transform_check(const CoframeField& cf, const ThetaTriad& th) {
  const CoframeParams& p = cf.params();
  const double r = p.sign * p.root();
  Eigen::Matrix3d A;
  A << 1.0, 2.0, 0.0, p.mu - r, 2.0 * p.mu, 0.0, -p.mu + r, 0.0, 2.0 * r;
  double worst = 0.0;
  for (std::size_t i = 0; i < cf.grid().size(); ++i) {
    const Eigen::Vector3d tx(th.t11[i], th.t21[i], th.t31[i]);
    const Eigen::Vector3d tt(th.t12[i], th.t22[i], th.t32[i]);
    const Eigen::Vector3d wx(cf.f11()[i], cf.f21()[i], cf.f31()[i]);
    const Eigen::Vector3d wt(cf.f12()[i], cf.f22()[i], cf.f32()[i]);
    worst = std::max(worst, (A * tx - wx).cwiseAbs().maxCoeff());
    worst = std::max(worst, (A * tt - wt).cwiseAbs().maxCoeff());
  }
  return worst;
}

Field pseudo_potential_residual(const SolutionJet& jet) { return jet.mt - jet.Fx - 2.0 * jet.F; }

Field pseudo_potential_residual(const SolverState& state) {
  return pseudo_potential_residual(make_jet(state));
}

GammaBarProfile gamma_bar_integrate(const Field& m, double gamma0, double x_start,
                                    std::optional<double> x_stop) {
  const Grid& g = m.grid();
  const double h = g.spacing();
  const double L = g.half_length();
  if (!std::isfinite(gamma0)) throw Error(ErrorKind::invalid_argument, "gamma0 must be finite");
  const double stop = x_stop.value_or(trusted_half_length(g));
  if (x_start < -L || stop >= L || stop <= x_start)
    throw Error(ErrorKind::invalid_argument, "gamma-bar integration range must lie inside the box");

  const auto i0 = static_cast<std::size_t>(std::ceil((x_start + L) / h - 1e-9));
  const auto i1 = static_cast<std::size_t>(std::floor((stop + L) / h + 1e-9));

  // m at sixteenth-cell offsets.
  std::vector<Field> shifted(16, m);
  for (int q = 1; q < 16; ++q) shifted[q] = shift(m, q * h / 16.0);
  std::optional<SpectralInterpolant> fine;

  GammaBarProfile out;
  RiccatiState s;
  s.value = gamma0;
  s.normalize();

  auto record = [&](std::size_t i) {
    const double gb = s.gb();
    out.nodes.push_back(i);
    out.x.push_back(g.node(i));
    out.values.push_back(gb);
    out.slopes.push_back(gb_rhs(gb, m[i]));
  };
  record(i0);

  for (std::size_t i = i0; i < i1; ++i) {
    const double x0 = g.node(i);
    auto sample_at = [&](long q16) {
      if (q16 <= 0) return m[i];
      if (q16 >= 16) return m[(i + 1) % g.size()];
      return shifted[q16][i];
    };
    // Richardson estimate: the error of the finer pass is about |coarse - fine| / 15.
    auto accept = [](const StepOutcome& a, const StepOutcome& b) {
      return !a.pole && !b.pole && a.state.distance(b.state) <= 15.0 * step_tol;
    };
    auto coarse = advance(s, x0, h, 2, [&](long q) { return sample_at(4 * q); });
    auto better = advance(s, x0, h, 4, [&](long q) { return sample_at(2 * q); });
    StepOutcome result = better;
    if (!accept(coarse, better)) {
      ++out.refined_steps;
      result = advance(s, x0, h, 8, sample_at);
      if (!result.pole && !accept(better, result)) ++out.unconverged_steps;
    }
    if (result.pole && !result.state.inverted) result.state.normalize();
    if (result.pole) {
      // w is linear and smooth through the pole: bisect a single RK4 step from the substep start.
      if (!fine) fine.emplace(m);
      const SpectralInterpolant& sp = *fine;
      const double xs = *result.pole;
      const double w0 = result.state.value;
      auto w_after = [&](double tau) {
        return rk4(true, w0, tau, [&](double x) { return sp.value(x); }, xs);
      };
      double lo = 0.0, hi = h / 8.0;
      if ((w_after(hi) > 0.0) != (w0 > 0.0)) {
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          ((w_after(mid) > 0.0) == (w0 > 0.0) ? lo : hi) = mid;
        }
      }
      result.pole = xs + hi;
    }
    if (result.pole) {
      out.pole = *result.pole;
      return out;
    }
    s = result.state;
    record(i + 1);
  }
  return out;
}

GammaBarProfile gamma_bar_integrate(const SolverState& state, double gamma0, double x_start,
                                    std::optional<double> x_stop) {
  return gamma_bar_integrate(state.m(), gamma0, x_start, x_stop);
}

double gamma_bar_t_integrate(const SeriesInterpolant& interp, double x, double t0, double t1,
                             double gamma0, int steps_per_interval) {
  if (steps_per_interval < 1)
    throw Error(ErrorKind::invalid_argument, "steps_per_interval must be positive");
  const auto& ts = interp.times();
  const double spacing = ts.size() > 1 ? (ts.back() - ts.front()) / (ts.size() - 1) : (t1 - t0);
  const auto n = std::max<long>(1, std::lround(std::abs(t1 - t0) / spacing * steps_per_interval));
  const double dt = (t1 - t0) / n;
  auto F_at = [&](double t) {
    const SpectralInterpolant sp(interp.spectrum_at(t));
    double d[3];
    sp.derivatives(x, 2, d);
    return d[1] * d[1] - 2.0 * d[0] * d[1] + d[0] * d[2];
  };
  double gb = gamma0;
  for (long k = 0; k < n; ++k) {
    const double t = t0 + k * dt;
    const double fa = F_at(t), fm = F_at(t + 0.5 * dt), fb = F_at(t + dt);
    auto f = [](double y, double F) { return 0.5 * y * y * F; };
    const double k1 = f(gb, fa);
    const double k2 = f(gb + 0.5 * dt * k1, fm);
    const double k3 = f(gb + 0.5 * dt * k2, fm);
    const double k4 = f(gb + dt * k3, fb);
    gb += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!std::isfinite(gb) || std::abs(gb) > 1.0 / pole_level)
      throw LocatedError(ErrorKind::pole_detected, "gamma-bar blows up along the t-path", x);
  }
  return gb;
}

double riccati_pole_distance(double c, double gamma0) {
  if (!(c > 0.0) || !(gamma0 > 0.0))
    throw Error(ErrorKind::invalid_argument, "pole distance needs c > 0 and gamma0 > 0");
  return 0.5 * std::log1p(4.0 / (c * gamma0));
}

PathConsistency gamma_bar_two_paths(const TimeSeries& series, const SeriesInterpolant& interp,
                                    std::size_t k0, std::size_t k1, double x1, double x2,
                                    double gamma0) {
  if (k0 >= series.snapshots.size() || k1 >= series.snapshots.size() || k0 == k1)
    throw Error(ErrorKind::invalid_argument, "two-path check needs two distinct snapshots");
  const SolverState& s0 = series.snapshots[k0];
  const SolverState& s1 = series.snapshots[k1];
  const Grid& g = s0.grid();
  const double xa = g.node(g.floor_index(x1));
  const auto a_path = gamma_bar_integrate(s0, gamma0, xa, x2);
  if (a_path.pole) throw LocatedError(ErrorKind::pole_detected, "pole on the x-path", *a_path.pole);
  const double xb = a_path.x.back();
  PathConsistency out;
  out.x_then_t = gamma_bar_t_integrate(interp, xb, s0.t(), s1.t(), a_path.values.back());
  const double mid = gamma_bar_t_integrate(interp, xa, s0.t(), s1.t(), gamma0);
  const auto b_path = gamma_bar_integrate(s1, mid, xa, xb);
  if (b_path.pole) throw LocatedError(ErrorKind::pole_detected, "pole on the x-path", *b_path.pole);
  out.t_then_x = b_path.values.back();
  out.difference = std::abs(out.x_then_t - out.t_then_x);
  return out;
}

ConservationReport conservation_law_check(const TimeSeries& series, double zeta, double drift_tol,
                                          double local_tol) {
  if (!(zeta != 0.0) || !std::isfinite(zeta))
    throw Error(ErrorKind::invalid_argument, "zeta must be finite and non-zero");
  const std::size_t K = series.snapshots.size();
  if (K < 5) throw Error(ErrorKind::invalid_argument, "conservation check needs five snapshots");
  const Grid& g = series.initial().grid();
  const double L = g.half_length();
  const double trusted = trusted_half_length(g);

  ConservationReport rep;
  rep.zeta = zeta;
  const std::array<std::pair<bool, int>, 4> combos{{{true, -1}, {true, 1}, {false, -1}, {false, 1}}};
  for (auto [printed, sgn] : combos) {
    ConservationReading r;
    r.theta1_as_printed = printed;
    r.theta2_uuxx_sign = sgn;
    r.name = std::string(printed ? "theta1-printed" : "theta1-substituted") +
             (sgn < 0 ? "/minus-uuxx" : "/plus-uuxx");
    rep.readings.push_back(r);
  }

  std::vector<std::array<double, 4>> integral(K);
  std::vector<std::array<std::vector<double>, 4>> theta1(K), dx_theta2(K);
  std::vector<double> e1(K);
  for (std::size_t k = 0; k < K; ++k) {
    const SolverState& st = series.snapshots[k];
    const Field& m = st.m();
    const auto prof = gamma_bar_integrate(m, -2.0, -L, g.node(g.size() - 1));
    if (prof.pole)
      throw LocatedError(ErrorKind::pole_detected, "gamma-bar pole during conservation check",
                         *prof.pole);
    const Field gb(g, prof.values);
    const Field gbx(g, prof.slopes);
    const Field Fp = wedge_factor(st.u());
    const Field Fm = minus_wedge_factor(st.u());
    e1[k] = riemann_sum(m);
    for (std::size_t r = 0; r < 4; ++r) {
      const auto& rd = rep.readings[r];
      const Field one_plus = gb + 1.0;
      const Field t1 = rd.theta1_as_printed
                           ? zeta * zeta * hadamard(m + (-2.0), one_plus) - m
                           : hadamard(m + 2.0, one_plus) - m;
      const Field& Fs = rd.theta2_uuxx_sign > 0 ? Fp : Fm;
      const Field d2 = hadamard(gbx, Fs) + hadamard(gb, deriv(Fs, 1));
      integral[k][r] = riemann_sum(t1);
      theta1[k][r] = t1.data();
      dx_theta2[k][r] = d2.data();
    }
  }

  const double elapsed = series.snapshots.back().t() - series.snapshots.front().t();
  for (std::size_t r = 0; r < 4; ++r) {
    auto& rd = rep.readings[r];
    double drift = 0.0;
    for (std::size_t k = 1; k < K; ++k) drift = std::max(drift, std::abs(integral[k][r] - integral[0][r]));
    rd.drift = drift / elapsed;
    double local = 0.0;
    // Fourth-order central differences in time; snapshots are equally spaced.
    for (std::size_t k = 2; k + 2 < K; ++k) {
      const double step = (series.snapshots[k + 2].t() - series.snapshots[k - 2].t()) / 4.0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        if (std::abs(g.node(i)) > trusted) continue;
        const double dt1 = (theta1[k - 2][r][i] - 8.0 * theta1[k - 1][r][i] +
                            8.0 * theta1[k + 1][r][i] - theta1[k + 2][r][i]) /
                           (12.0 * step);
        local = std::max(local, std::abs(dt1 - dx_theta2[k][r][i]));
      }
    }
    rd.local_residual = local;
    rd.satisfied = rd.drift < drift_tol && rd.local_residual < local_tol;
    if (rd.satisfied) rep.verdict += (rep.verdict.empty() ? "" : ",") + rd.name;
  }
  if (rep.verdict.empty()) rep.verdict = "none";
  double e1d = 0.0;
  for (std::size_t k = 1; k < K; ++k) e1d = std::max(e1d, std::abs(e1[k] - e1[0]));
  rep.e1_drift = e1d / elapsed;
  return rep;
}

ZcrField zcr_matrices(const CoframeField& cf) {
  return {pack_field(cf.f11(), cf.f21(), cf.f31()), pack_field(cf.f12(), cf.f22(), cf.f32())};
}

ZcrField zcr_matrices(const ThetaTriad& th) {
  return {pack_field(th.t11, th.t21, th.t31), pack_field(th.t12, th.t22, th.t32)};
}

ZcrField printed_zcr(const Field& m, const Field& F, double mu, int sign) {
  CoframeParams{mu, sign}.validate();
  const double r = std::sqrt(1.0 + mu * mu);
  const double s = sign;
  ZcrField z;
  for (std::size_t i = 0; i < m.size(); ++i) {
    Mat2 X, T;
    X << mu * m[i] + s * 2.0 * r, (1.0 - s * r) * m[i] - 2.0 * mu,
        (1.0 + s * r) * m[i] + 2.0 * mu, -mu * m[i] - s * 2.0 * r;
    T << mu, 1.0 - s * r, 1.0 + s * r, -mu;
    z.X.values.push_back(0.5 * X);
    z.T.values.push_back(0.5 * F[i] * T);
  }
  return z;
}

ZcrField printed_zcr_bar(const Field& m, const Field& F) {
  ZcrField z;
  for (std::size_t i = 0; i < m.size(); ++i) {
    Mat2 X, T;
    X << 1.0 + 0.5 * m[i], -3.0 - 0.5 * m[i], -1.0 + 0.5 * m[i], -1.0 - 0.5 * m[i];
    T << 0.5, -0.5, 0.5, -0.5;
    z.X.values.push_back(0.5 * X);
    z.T.values.push_back(0.5 * F[i] * T);
  }
  return z;
}

double zcr_difference(const ZcrField& a, const ZcrField& b) {
  if (a.X.size() != b.X.size()) throw Error(ErrorKind::grid_mismatch, "zcr fields differ in size");
  double out = 0.0;
  for (std::size_t i = 0; i < a.X.size(); ++i) {
    out = std::max(out, sup_abs(a.X.values[i] - b.X.values[i]));
    out = std::max(out, sup_abs(a.T.values[i] - b.T.values[i]));
  }
  return out;
}

MatrixField zcr_residual(const SolutionJet& jet, const CoframeField& cf) {
  const CoframeDerivatives d = coframe_derivatives(jet, cf.params());
  const ZcrField z = zcr_matrices(cf);
  MatrixField out;
  for (std::size_t i = 0; i < jet.m.size(); ++i) {
    const Mat2 Xt = pack(d.dt_f11[i], d.dt_f21[i], d.dt_f31[i]);
    const Mat2 Tx = pack(d.dx_f12[i], d.dx_f22[i], d.dx_f32[i]);
    const Mat2& X = z.X.values[i];
    const Mat2& T = z.T.values[i];
    out.values.push_back(Xt - Tx + X * T - T * X);
  }
  return out;
}

MatrixField zcr_residual_bar(const SolutionJet& jet) {
  const ZcrField z = zcr_matrices(theta_triad(jet.m, jet.F));
  MatrixField out;
  for (std::size_t i = 0; i < jet.m.size(); ++i) {
    const Mat2 Xt = pack(0.0, 0.5 * jet.mt[i], 0.5 * jet.mt[i]);
    const Mat2 Tx = pack(0.0, 0.5 * jet.Fx[i], 0.5 * jet.Fx[i]);
    const Mat2& X = z.X.values[i];
    const Mat2& T = z.T.values[i];
    out.values.push_back(Xt - Tx + X * T - T * X);
  }
  return out;
}

Mat2 gauge_matrix(double mu, int branch, double m) {
  CoframeParams{mu, branch}.validate();
  Mat2 S;
  if (mu == 0.0) {
    if (branch > 0)
      S << 3.0, 1.0, -1.0, 1.0;
    else
      S << -1.0, -3.0, -1.0, 1.0;
    return S;
  }
  const double r = std::sqrt(1.0 + mu * mu);
  const double k = m * (-1.0 + 2.0 * mu);
  if (branch > 0) {
    const double den = -2.0 + k + 4.0 * r;
    const double a = (6.0 + 8.0 * mu * mu + mu * (4.0 - 8.0 * r) + k * (1.0 - 2.0 * mu + 2.0 * r)) / den;
    S << a, -1.0 - 2.0 * mu + 2.0 * r, -1.0, 1.0;
  } else {
    const double e = 2.0 + m - 2.0 * m * mu + 4.0 * r;
    S << k * (-3.0 + mu + 3.0 * r) - 2.0 * (3.0 + mu + 6.0 * mu * mu - 3.0 * r + 2.0 * mu * r),
        -(-1.0 + 3.0 * mu + r) * e, (-1.0 - mu + r) * e,
        k * (-1.0 - mu + r) + 2.0 * (-1.0 + mu - 2.0 * mu * mu + r + 2.0 * mu * r);
  }
  return S;
}

GaugeReport gauge_conjugation_check(const SolutionJet& jet, double mu, int branch, double lambda) {
  const ZcrField z = printed_zcr(jet.m, jet.F, mu, branch);
  const ZcrField zb = printed_zcr_bar(jet.m, jet.F);
  const double r = std::sqrt(1.0 + mu * mu);
  const Grid& g = jet.m.grid();
  GaugeReport rep;
  rep.min_abs_det = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < jet.m.size(); ++i) {
    const Mat2 S = gauge_matrix(mu, branch, jet.m[i]);
    const double det = S.determinant();
    const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());
    if (!std::isfinite(det) || std::abs(det) < 1e-12 * scale * scale) {
      if (!rep.singular_at) rep.singular_at = g.node(i);
      rep.min_abs_det = 0.0;
      continue;
    }
    rep.min_abs_det = std::min(rep.min_abs_det, std::abs(det));
    const Mat2 Si = S.inverse();
    const Mat2 Sl = lambda * S;
    const Mat2 Sli = Sl.inverse();
    rep.x_residual = std::max(rep.x_residual, sup_abs(S * z.X.values[i] * Si - zb.X.values[i]));
    rep.t_residual = std::max(rep.t_residual, sup_abs(S * z.T.values[i] * Si - zb.T.values[i]));
    rep.scaled_x_residual =
        std::max(rep.scaled_x_residual, sup_abs(Sl * z.X.values[i] * Sli - zb.X.values[i]));
    rep.scaled_t_residual =
        std::max(rep.scaled_t_residual, sup_abs(Sl * z.T.values[i] * Sli - zb.T.values[i]));
    const Mat2 Xt = pack(jet.mt[i], mu * jet.mt[i], branch * r * jet.mt[i]);
    const Mat2 Xbt = pack(0.0, 0.5 * jet.mt[i], 0.5 * jet.mt[i]);
    rep.derivative_mismatch = std::max(rep.derivative_mismatch, sup_abs(Xbt - S * Xt * Si));
  }
  return rep;
}

GaugeReport gauge_conjugation_check(const SolverState& state, double mu, int branch, double lambda) {
  return gauge_conjugation_check(make_jet(state), mu, branch, lambda);
}

}  // namespace dpgeo
