#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "checks_internal.hpp"
#include "vfl/integrate.hpp"
#include "vfl/particle.hpp"
#include "vfl/variational.hpp"

namespace vfl::checks {

namespace {

PotentialField coulomb(double q_f, const Vec3& u_f = {}, const ExternalVectorPotential& ext = {},
                       double test_charge = 1.0) {
  SourceSpec spec;
  spec.kind = norm2(u_f) > 0.0 ? SourceKind::CoulombComoving : SourceKind::CoulombStatic;
  spec.strength = q_f;
  spec.velocity = u_f;
  spec.softening = 1e-3;
  spec.external = ext;
  return build_potential(spec, test_charge);
}

ForceModel model_of(ModelKind kind, Formulation f, const PotentialField& field, double q = 1.0,
                    double m0 = 1.0) {
  ForceModel m;
  m.kind = kind;
  m.formulation = f;
  m.field = field;
  m.charge = q;
  m.rest_mass = m0;
  return m;
}

IntegrationParams rk4(double step, long n, Clock clock = Clock::Lab, int audit_every = 1) {
  IntegrationParams p;
  p.step = step;
  p.n_steps = n;
  p.clock = clock;
  p.audit_every = audit_every;
  return p;
}

const double kFourPi = 4.0 * M_PI;
const Vec3 kR0{1.0, 0.0, 0.0};
const Vec3 kU0{0.0, 0.5, 0.0};

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

CriterionResult rest_mass_recovery() {
  Timer timer;
  CriterionResult r = start(1, "rest-mass recovery, vacuum-free softened Coulomb, 1e4 RK4 steps");
  return guarded(r, timer, [&] {
    const ForceModel m = model_of(ModelKind::VacuumFree, Formulation::ForceLaw, coulomb(kFourPi));
    const ParticleState s0 = make_initial_state(m, kR0, kU0);
    const Trajectory traj = integrate_particle(m, s0, rk4(1e-4, 10000, Clock::Lab, 10));
    const double m0 = -m.field.wbar(kR0, 0.0) * std::sqrt(1.0 - norm2(kU0));
    double worst = 0.0;
    for (const TrajectorySample& s : traj.samples) {
      const double w = m.field.wbar(s.state.r, s.state.t);
      const Vec3 u = s.state.p / -w;
      worst = std::max(worst, std::abs(-w * std::sqrt(1.0 - norm2(u)) - m0) / m0);
    }
    const double secs = timer.seconds();
    r.passed = worst < 1e-6 && secs < 1.0;
    std::ostringstream d;
    d << "max relative deviation " << worst << " (limit 1e-6), runtime " << secs << " s";
    r.detail = d.str();
  });
}

CriterionResult hamiltonian_conservation() {
  Timer timer;
  CriterionResult r = start(2, "Hamiltonian conservation, vacuum-free and interacting, 1e4 steps");
  return guarded(r, timer, [&] {
    Timer t1;
    const ForceModel mf = model_of(ModelKind::VacuumFree, Formulation::ForceLaw, coulomb(kFourPi));
    const Trajectory a =
        integrate_particle(mf, make_initial_state(mf, kR0, kU0), rk4(1e-4, 10000, Clock::Lab, 10));
    const double drift_free = a.report.find("hamiltonian")->relative_drift;
    const double s1 = t1.seconds();

    Timer t2;
    TwoParticleScenario sc;
    sc.q = 1.0;
    sc.q_f = kFourPi;
    sc.u_f = {0.3, 0.0, 0.0};
    const ForceModel mi = sc.model(Formulation::Canonical);
    // Large relative velocity drives the canonical flow out of the energy domain.
    const Trajectory b = integrate_particle(mi, make_initial_state(mi, kR0, {0.4, 0.2, 0.0}),
                                            rk4(1e-4, 10000, Clock::Proper, 10));
    const double drift_int = b.report.find("hamiltonian")->relative_drift;
    const double s2 = t2.seconds();

    r.passed = drift_free < 1e-6 && drift_int < 1e-5 && s1 < 2.0 && s2 < 2.0;
    std::ostringstream d;
    d << "vacuum-free drift " << drift_free << " (limit 1e-6, " << s1 << " s); interacting drift "
      << drift_int << " (limit 1e-5, " << s2 << " s)";
    r.detail = d.str();
  });
}

CriterionResult classical_limit() {
  Timer timer;
  CriterionResult r = start(3, "classical limit, q-sweep of interacting vs classical distance");
  return guarded(r, timer, [&] {
    ExternalVectorPotential ext;
    ext.ramp = {0.5, 0.0, 0.0};
    const PotentialField field = coulomb(kFourPi, {}, ext);
    const double m0 = -field.wbar(kR0, 0.0) * std::sqrt(1.0 - norm2(kU0));
    std::vector<double> qs{1e-2, 1e-3, 1e-4}, dist;
    for (double q : qs) {
      const ForceModel mi = model_of(ModelKind::VacuumInteracting, Formulation::ForceLaw, field, q);
      const ForceModel mc = model_of(ModelKind::Classical, Formulation::ForceLaw, field, q, m0);
      const Trajectory ti = integrate_particle(mi, make_initial_state(mi, kR0, kU0), rk4(1e-3, 1000));
      const Trajectory tc = integrate_particle(mc, make_initial_state(mc, kR0, kU0), rk4(1e-3, 1000));
      double d = 0.0;
      for (size_t i = 0; i < ti.samples.size(); ++i) {
        d = std::max(d, norm(ti.samples[i].state.r - tc.samples[i].state.r));
      }
      dist.push_back(d);
    }
    const double k = slope(qs, dist);
    r.passed = std::abs(k - 1.0) <= 0.2 && dist.back() > 0.0;
    std::ostringstream d;
    d << "distances " << dist[0] << ", " << dist[1] << ", " << dist[2] << "; log-log slope " << k
      << " (target 1.0 +- 0.2)";
    r.detail = d.str();
  });
}

CriterionResult contact_force_oracle() {
  Timer timer;
  CriterionResult r = start(4, "F_c oracle, analytic vs central-difference gradient, 100 states");
  return guarded(r, timer, [&] {
    std::mt19937_64 rng(0x5eed0004);
    std::uniform_real_distribution<double> box(-2.0, 2.0), unit(-1.0, 1.0), tt(0.0, 1.0);
    ExternalVectorPotential ext;
    for (int i = 0; i < 3; ++i) {
      ext.offset[i] = unit(rng);
      ext.ramp[i] = unit(rng);
      for (int j = 0; j < 3; ++j) ext.gradient(i, j) = unit(rng);
    }
    const double q = 0.7;
    const PotentialField f = coulomb(2.0 * M_PI, {0.3, -0.2, 0.1}, ext, q);
    double worst = 0.0;
    for (int n = 0; n < 100; ++n) {
      const double t = tt(rng);
      Vec3 x;
      do {
        x = {box(rng), box(rng), box(rng)};
      } while (norm(x - f.source_position(t)) < 0.2);
      Vec3 u{unit(rng), unit(rng), unit(rng)};
      u = u * (0.9 * tt(rng) / std::max(1.0, norm(u)));
      const Vec3 a = interaction_extra_force(q, u, f, x, t);
      const double h = 1e-5 * std::max(1.0, norm(x));
      Vec3 fd;
      for (int c = 0; c < 3; ++c) {
        Vec3 xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        fd[c] = -q * (dot(u, f.vecpot(xp, t)) - dot(u, f.vecpot(xm, t))) / (2.0 * h);
      }
      worst = std::max(worst, norm(a - fd) / std::max(norm(a), 1e-8));
    }
    r.passed = worst < 1e-6;
    std::ostringstream d;
    d << "max relative error " << worst << " (limit 1e-6)";
    r.detail = d.str();
  });
}

CriterionResult constrained_multiplier() {
  Timer timer;
  CriterionResult r = start(5, "constrained multiplier constancy and classical agreement, uniform E");
  return guarded(r, timer, [&] {
    ExternalVectorPotential ext;
    ext.ramp = {-0.3, 0.1, 0.0};
    const PotentialField field = PotentialField::uniform(-1.0, ext);
    const Vec3 r0{0.0, 0.0, 0.0}, u0{0.1, 0.2, 0.0};
    const ForceModel mk = model_of(ModelKind::Constrained, Formulation::ForceLaw, field);
    const ForceModel mc = model_of(ModelKind::Classical, Formulation::ForceLaw, field);
    const Trajectory tk = integrate_particle(mk, make_initial_state(mk, r0, u0), rk4(1e-3, 2000));
    const Trajectory tc = integrate_particle(mc, make_initial_state(mc, r0, u0), rk4(1e-3, 2000));
    double gap = 0.0;
    for (size_t i = 0; i < tk.samples.size(); ++i) {
      gap = std::max(gap, norm(tk.samples[i].state.r - tc.samples[i].state.r));
    }
    const Trajectory tp =
        integrate_particle(mk, make_initial_state(mk, r0, u0), rk4(1e-3, 2000, Clock::Proper));
    DiscretePath path;
    path.s0 = tp.samples.front().state.tau;
    path.s1 = tp.samples.back().state.tau;
    for (const TrajectorySample& s : tp.samples) {
      path.r.push_back(s.state.r);
      path.t.push_back(s.state.t);
    }
    const MultiplierReport mr = multiplier_consistency(path, 1.0, 1e-7);
    r.passed = mr.constant && gap < 1e-6;
    std::ostringstream d;
    d << "multiplier spread " << mr.spread << " (limit 1e-7), constrained-classical gap " << gap
      << " (limit 1e-6)";
    r.detail = d.str();
  });
}

namespace {

struct ElCase {
  const char* name;
  ModelKind model;
  LagrangianKind lagrangian;
  Clock clock;
  PotentialField field;
};

double el_residual_for(const ElCase& c, double step, long n) {
  ForceModel m = model_of(c.model, Formulation::ForceLaw, c.field);
  const Trajectory tr = integrate_particle(m, make_initial_state(m, kR0, kU0), rk4(step, n, c.clock));
  DiscretePath path;
  const bool by_t = c.clock == Clock::Lab;
  for (const TrajectorySample& s : tr.samples) {
    path.r.push_back(s.state.r);
    if (!by_t) path.t.push_back(s.state.t);
  }
  path.s0 = by_t ? tr.samples.front().state.t : tr.samples.front().state.tau;
  path.s1 = by_t ? tr.samples.back().state.t : tr.samples.back().state.tau;
  LagrangianSpec spec;
  spec.kind = c.lagrangian;
  spec.field = c.field;
  spec.rest_mass = 1.0;
  spec.multiplier = 1.0;
  return max_norm(euler_lagrange_residual(spec, path));
}

}  // namespace

CriterionResult variational_cross_check() {
  Timer timer;
  CriterionResult r = start(6, "variational cross-validation of the four particle models");
  return guarded(r, timer, [&] {
    const PotentialField stat = coulomb(kFourPi);
    const PotentialField moving = coulomb(kFourPi, {0.2, 0.0, 0.0});
    const ElCase cases[] = {
        {"classical", ModelKind::Classical, LagrangianKind::ClassicalPoint, Clock::Lab, stat},
        {"constrained", ModelKind::Constrained, LagrangianKind::ConstrainedPoint, Clock::Proper, stat},
        {"vacuum-free", ModelKind::VacuumFree, LagrangianKind::VacuumFreePoint, Clock::Proper, stat},
        {"vacuum-interacting", ModelKind::VacuumInteracting, LagrangianKind::VacuumInteractingPoint,
         Clock::Proper, moving}};
    bool ok = true;
    std::ostringstream d;
    for (const ElCase& c : cases) {
      const double coarse = el_residual_for(c, 1e-3, 500);
      const double fine = el_residual_for(c, 5e-4, 1000);
      const double order = std::log2(coarse / fine);
      ok = ok && fine < 1e-5 && std::abs(order - 2.0) <= 0.3;
      d << c.name << ": " << fine << " (order " << order << "); ";
    }
    d << "limits 1e-5, order 2.0 +- 0.3";
    r.passed = ok;
    r.detail = d.str();
  });
}

CriterionResult gyro_orbit() {
  Timer timer;
  CriterionResult r = start(7, "gyro-orbit oracle, classical model in uniform B");
  return guarded(r, timer, [&] {
    const double b0 = 1.0, q = 1.0, m0 = 1.0;
    ExternalVectorPotential ext;
    ext.gradient(0, 1) = -0.5 * b0;
    ext.gradient(1, 0) = 0.5 * b0;
    const PotentialField field = PotentialField::uniform(-1.0, ext);
    const ForceModel m = model_of(ModelKind::Classical, Formulation::ForceLaw, field, q, m0);
    const Vec3 u0{0.5, 0.0, 0.0};
    const double gamma = 1.0 / std::sqrt(1.0 - norm2(u0));
    const double radius = m0 * gamma * norm(u0) / (q * b0);
    const double period = 2.0 * M_PI * m0 * gamma / (q * b0);
    const Vec3 center{0.0, -radius, 0.0};

    auto run = [&](long n) {
      return integrate_particle(m, make_initial_state(m, {}, u0), rk4(period / n, n));
    };
    const Trajectory fine = run(2000);
    double rad_err = 0.0, phase = 0.0, prev = std::atan2(0.0 - center.y, 0.0 - center.x);
    for (const TrajectorySample& s : fine.samples) {
      const Vec3 d = s.state.r - center;
      rad_err = std::max(rad_err, std::abs(std::hypot(d.x, d.y) - radius) / radius);
      const double a = std::atan2(d.y, d.x);
      double da = a - prev;
      if (da > M_PI) da -= 2.0 * M_PI;
      if (da < -M_PI) da += 2.0 * M_PI;
      phase += da;
      prev = a;
    }
    const double period_err = std::abs(std::abs(phase) - 2.0 * M_PI) / (2.0 * M_PI);

    std::vector<double> steps, errs;
    for (long n : {50L, 100L, 200L, 400L}) {
      const Trajectory t = run(n);
      steps.push_back(period / n);
      errs.push_back(norm(t.samples.back().state.r));
    }
    const double order = slope(steps, errs);
    r.passed = rad_err < 1e-6 && period_err < 1e-6 && std::abs(order - 4.0) <= 0.3;
    std::ostringstream d;
    d << "radius error " << rad_err << ", period error " << period_err << " (limits 1e-6), RK4 order "
      << order << " (target 4 +- 0.3)";
    r.detail = d.str();
  });
}

}  // namespace vfl::checks
