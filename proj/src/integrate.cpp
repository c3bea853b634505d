#include "vfl/integrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "vfl/errors.hpp"

namespace vfl {

void IntegrationParams::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw PhysicsError(ErrorCode::InvalidInput, "step must be positive and finite");
  }
  if (n_steps < 1) throw PhysicsError(ErrorCode::InvalidInput, "n_steps must be positive");
  if (audit_every < 1) throw PhysicsError(ErrorCode::InvalidInput, "audit_every must be >= 1");
  if (method == Method::RK45 && (!(rel_tol > 0.0) || !(abs_tol >= 0.0))) {
    throw PhysicsError(ErrorCode::InvalidInput, "adaptive tolerances must be positive");
  }
}

void ConservationReport::record(const std::string& name, double value) {
  for (InvariantStats& s : invariants) {
    if (s.name != name) continue;
    const double drift = std::abs(value - s.initial);
    if (!(drift <= s.max_abs_drift)) s.max_abs_drift = drift;
    const double scale = std::abs(s.initial) > 0.0 ? std::abs(s.initial) : 1.0;
    s.relative_drift = s.max_abs_drift / scale;
    ++s.samples;
    return;
  }
  invariants.push_back({name, value, 0.0, 0.0, 1});
}

const InvariantStats* ConservationReport::find(const std::string& name) const {
  for (const InvariantStats& s : invariants)
    if (s.name == name) return &s;
  return nullptr;
}

namespace {

template <class Y>
void axpy(Y& out, const Y& y, double a, const Y& k) {
  for (size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * k[i];
}

template <class Y, class F>
Y rk4_step(const Y& y, double h, F&& f) {
  Y tmp = y;
  const Y k1 = f(y);
  axpy(tmp, y, 0.5 * h, k1);
  const Y k2 = f(tmp);
  axpy(tmp, y, 0.5 * h, k2);
  const Y k3 = f(tmp);
  axpy(tmp, y, h, k3);
  const Y k4 = f(tmp);
  Y out = y;
  for (size_t i = 0; i < y.size(); ++i) out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

// Dormand-Prince 5(4) step; returns the fifth-order solution and writes the
// embedded error estimate.
template <class Y, class F>
Y dp45_step(const Y& y, double h, F&& f, Y& err) {
  static constexpr double a21 = 1.0 / 5, a31 = 3.0 / 40, a32 = 9.0 / 40, a41 = 44.0 / 45,
                          a42 = -56.0 / 15, a43 = 32.0 / 9, a51 = 19372.0 / 6561,
                          a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729,
                          a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656, b1 = 35.0 / 384,
                          b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84, e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                          e7 = -1.0 / 40;
  const size_t n = y.size();
  Y t = y;
  const Y k1 = f(y);
  for (size_t i = 0; i < n; ++i) t[i] = y[i] + h * a21 * k1[i];
  const Y k2 = f(t);
  for (size_t i = 0; i < n; ++i) t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
  const Y k3 = f(t);
  for (size_t i = 0; i < n; ++i) t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
  const Y k4 = f(t);
  for (size_t i = 0; i < n; ++i)
    t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  const Y k5 = f(t);
  for (size_t i = 0; i < n; ++i)
    t[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
  const Y k6 = f(t);
  Y out = y;
  for (size_t i = 0; i < n; ++i)
    out[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
  const Y k7 = f(out);
  err = y;
  for (size_t i = 0; i < n; ++i)
    err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
  return out;
}

template <class Y>
double error_norm(const Y& y0, const Y& y1, const Y& err, double rel_tol, double abs_tol) {
  double worst = 0.0;
  for (size_t i = 0; i < y0.size(); ++i) {
    const double sc = abs_tol + rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    worst = std::max(worst, std::abs(err[i]) / sc);
  }
  return std::isfinite(worst) ? worst : HUGE_VAL;
}

// Advances y across one output interval h, substepping adaptively when requested.
template <class Y, class F>
Y advance(const Y& y, double h, const IntegrationParams& params, F&& f, double& trial,
          long& rejected) {
  if (params.method == Method::RK4) return rk4_step(y, h, f);
  const double min_step = std::abs(h) * 1e-10;
  double done = 0.0;
  Y cur = y;
  Y err = y;
  while (done < h) {
    double dh = std::min(trial, h - done);
    if (h - done - dh < 1e-12 * h) dh = h - done;
    Y next = dp45_step(cur, dh, f, err);
    const double e = error_norm(cur, next, err, params.rel_tol, params.abs_tol);
    if (e <= 1.0) {
      cur = next;
      done += dh;
      const double grow = e > 0.0 ? 0.9 * std::pow(e, -0.2) : 5.0;
      trial = dh * std::clamp(grow, 0.2, 5.0);
    } else {
      ++rejected;
      trial = dh * std::clamp(0.9 * std::pow(e, -0.2), 0.1, 0.5);
      if (trial < min_step) {
        throw PhysicsError(ErrorCode::StepFailure,
                           "adaptive step fell below " + std::to_string(min_step));
      }
    }
  }
  return cur;
}

using Packed = std::array<double, 9>;

Packed pack(const ParticleState& s) {
  return {s.r.x, s.r.y, s.r.z, s.p.x, s.p.y, s.p.z, s.multiplier, s.tau, s.t};
}

ParticleState unpack(const Packed& y, const ParticleState& like, const ForceModel& model) {
  ParticleState s = like;
  s.r = {y[0], y[1], y[2]};
  s.p = {y[3], y[4], y[5]};
  s.multiplier = y[6];
  s.tau = y[7];
  s.t = y[8];
  refresh_velocity(s, model);
  return s;
}

void audit(ConservationReport& report, const ParticleState& s, const ForceModel& model) {
  for (const NamedValue& v : conserved_quantities(s, model)) report.record(v.name, v.value);
}

}  // namespace

Trajectory integrate_particle(const ForceModel& model, const ParticleState& initial,
                              const IntegrationParams& params) {
  params.validate();
  Trajectory traj;
  traj.clock = params.clock;
  traj.report.softening = model.field.softening();

  auto rhs = [&](const Packed& y) {
    const ParticleState s = unpack(y, initial, model);
    const ParticleRates r = model_rhs(s, model);
    const double per = params.clock == Clock::Lab ? r.dt : r.dtau;
    if (!(per > 0.0) || !std::isfinite(per)) {
      throw PhysicsError(ErrorCode::DomainError, "clock rate is not positive", std::nullopt, s.tau);
    }
    const double k = 1.0 / per;
    return Packed{r.dr.x * k, r.dr.y * k, r.dr.z * k, r.dp.x * k, r.dp.y * k, r.dp.z * k,
                  r.dmultiplier * k, r.dtau * k, r.dt * k};
  };

  Packed y = pack(initial);
  ParticleState cur = unpack(y, initial, model);
  traj.samples.push_back({0, cur});
  audit(traj.report, cur, model);

  double trial = params.step;
  for (long n = 1; n <= params.n_steps; ++n) {
    try {
      y = advance(y, params.step, params, rhs, trial, traj.rejected_steps);
      cur = unpack(y, initial, model);
      for (double v : y) {
        if (!std::isfinite(v)) throw PhysicsError(ErrorCode::DomainError, "state became non-finite");
      }
      if (n % params.audit_every == 0 || n == params.n_steps) {
        traj.samples.push_back({n, cur});
        audit(traj.report, cur, model);
      }
    } catch (const PhysicsError& e) {
      if (e.tau()) throw;
      throw e.at_tau(cur.tau);
    }
  }
  return traj;
}

namespace {

std::vector<double> pack_string(const StringState& s) {
  std::vector<double> y(6 * s.r.size());
  for (size_t i = 0; i < s.r.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      y[6 * i + c] = s.r[i][c];
      y[6 * i + 3 + c] = s.p[i][c];
    }
  }
  return y;
}

void unpack_string(const std::vector<double>& y, StringState& s) {
  for (size_t i = 0; i < s.r.size(); ++i) {
    s.r[i] = {y[6 * i], y[6 * i + 1], y[6 * i + 2]};
    s.p[i] = {y[6 * i + 3], y[6 * i + 4], y[6 * i + 5]};
  }
}

void audit_string(ConservationReport& report, const StringState& s, const PotentialField& w) {
  report.record("hamiltonian", string_hamiltonian(s, w));
  report.record("transversality_defect", transversality_defect(s));
}

}  // namespace

StringTrajectory integrate_string(const StringState& initial, const PotentialField& w,
                                  const IntegrationParams& params) {
  params.validate();
  initial.validate();
  StringTrajectory traj;
  traj.report.softening = w.softening();

  StringState work = initial;
  double tau0 = initial.tau;
  auto rhs = [&](const std::vector<double>& y) {
    unpack_string(y, work);
    const StringRates r = string_canonical_rhs(work, w);
    std::vector<double> d(y.size());
    for (size_t i = 0; i < work.r.size(); ++i) {
      for (int c = 0; c < 3; ++c) {
        d[6 * i + c] = r.dr[i][c];
        d[6 * i + 3 + c] = r.dp[i][c];
      }
    }
    return d;
  };

  std::vector<double> y = pack_string(initial);
  traj.samples.push_back({0, initial});
  audit_string(traj.report, initial, w);

  double trial = params.step;
  long rejected = 0;
  StringState cur = initial;
  for (long n = 1; n <= params.n_steps; ++n) {
    try {
      work.tau = tau0 + (n - 1) * params.step;
      y = advance(y, params.step, params, rhs, trial, rejected);
      unpack_string(y, cur);
      cur.tau = tau0 + n * params.step;
      if (n % params.audit_every == 0 || n == params.n_steps) {
        traj.samples.push_back({n, cur});
        audit_string(traj.report, cur, w);
      }
    } catch (const PhysicsError& e) {
      if (e.tau()) throw;
      throw e.at_tau(cur.tau);
    }
  }
  return traj;
}

RelaxationResult relax_elliptic(const NodeRelaxation& op, ConformalPatch initial, double tol,
                                long max_iters, double omega, int check_every) {
  if (!op.local_solve || !op.max_residual) {
    throw PhysicsError(ErrorCode::InvalidInput, "relaxation operator is incomplete");
  }
  if (!(tol > 0.0) || max_iters < 1 || !(omega > 0.0 && omega < 2.0) || check_every < 1) {
    throw PhysicsError(ErrorCode::InvalidInput, "invalid relaxation parameters");
  }
  RelaxationResult out;
  out.patch = std::move(initial);
  ConformalPatch& p = out.patch;
  std::vector<double> history;

  double res = op.max_residual(p);
  for (long it = 1; it <= max_iters; ++it) {
    if (res < tol) break;
    if (op.refresh) op.refresh(p);
    for (int j = 1; j < p.n_s - 1; ++j) {
      for (int i = 1; i < p.n_sigma - 1; ++i) {
        const EuclideanEvent target = op.local_solve(p, i, j);
        EuclideanEvent& x = p.at(i, j);
        x += (target - x) * omega;
      }
    }
    out.iterations = it;
    if (it % check_every == 0 || it == max_iters) {
      res = op.max_residual(p);
      history.push_back(res);
      if (!std::isfinite(res)) break;
    }
  }
  out.final_residual = res;
  if (!(res < tol)) {
    std::ostringstream msg;
    msg << "relaxation stopped after " << out.iterations << " sweeps with residual " << res
        << " (tol " << tol << "); last residuals:";
    const size_t from = history.size() > 5 ? history.size() - 5 : 0;
    for (size_t k = from; k < history.size(); ++k) msg << ' ' << history[k];
    throw PhysicsError(ErrorCode::NoConvergence, msg.str());
  }
  return out;
}

}  // namespace vfl
