#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vfl/errors.hpp"
#include "vfl/integrate.hpp"
#include "vfl/particle.hpp"
#include "vfl/variational.hpp"

using namespace vfl;

namespace {

PotentialField coulomb(double qf, const Vec3& uf = {}, const ExternalVectorPotential& ext = {}) {
  SourceSpec s;
  s.kind = norm2(uf) > 0.0 ? SourceKind::CoulombComoving : SourceKind::CoulombStatic;
  s.strength = qf;
  s.velocity = uf;
  s.external = ext;
  return build_potential(s, 1.0);
}

ForceModel model(ModelKind k, const PotentialField& f, Formulation form = Formulation::ForceLaw,
                 double q = 1.0, double m0 = 1.0) {
  ForceModel m;
  m.kind = k;
  m.formulation = form;
  m.field = f;
  m.charge = q;
  m.rest_mass = m0;
  return m;
}

IntegrationParams rk4(double h, long n, Clock c = Clock::Lab) {
  IntegrationParams p;
  p.step = h;
  p.n_steps = n;
  p.clock = c;
  return p;
}

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const PhysicsError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no PhysicsError";
  return ErrorCode::InvalidInput;
}

const Vec3 kR0{1.0, 0.0, 0.0};
const Vec3 kU0{0.0, 0.5, 0.0};

}  // namespace

TEST(ClassicalMomentum, Values) {
  EXPECT_EQ(classical_momentum(1.0, {}), Vec3{});
  EXPECT_LT(norm(classical_momentum(1.0, {0.6, 0.0, 0.0}) - Vec3{0.75, 0.0, 0.0}), 1e-15);
  EXPECT_LT(norm(classical_momentum(2.0, {0.0, 0.6, 0.0}) - Vec3{0.0, 1.5, 0.0}), 1e-15);
  EXPECT_EQ(code_of([] { classical_momentum(1.0, {1.0, 0.0, 0.0}); }),
            ErrorCode::SuperluminalVelocity);
}

TEST(DynamicMass, Values) {
  EXPECT_DOUBLE_EQ(dynamic_mass(-2.0), 2.0);
  EXPECT_EQ(code_of([] { dynamic_mass(0.0); }), ErrorCode::NonpositiveMass);
  // At rest the dynamic mass is the rest mass.
  const PotentialField f = coulomb(4.0 * M_PI);
  const ParticleState s = make_initial_state(model(ModelKind::VacuumFree, f), kR0, {});
  EXPECT_NEAR(dynamic_mass(f.wbar(kR0, 0.0)), s.rest_mass, 1e-15);
}

TEST(VacuumMomentum, Values) {
  EXPECT_EQ(vacuum_momentum(-1.0, {}), Vec3{});
  EXPECT_LT(norm(vacuum_momentum(-1.0, {0.5, 0.0, 0.0}) - Vec3{0.5, 0.0, 0.0}), 1e-15);
  EXPECT_NEAR(norm(vacuum_momentum(-1.25, {0.6, 0.0, 0.0})), 0.75, 1e-15);
}

TEST(VacuumFreeHamiltonian, Values) {
  EXPECT_DOUBLE_EQ(vacuum_free_hamiltonian(-1.0, {}), -1.0);
  EXPECT_NEAR(vacuum_free_hamiltonian(-1.25, {0.75, 0.0, 0.0}), -1.0, 1e-15);
  EXPECT_EQ(code_of([] { vacuum_free_hamiltonian(-1.0, {2.0, 0.0, 0.0}); }),
            ErrorCode::EnergyDomain);
  EXPECT_DOUBLE_EQ(total_energy(-3.0, {}), 3.0);
  EXPECT_NEAR(total_energy(-1.25, {0.0, 0.75, 0.0}), 1.0, 1e-15);
}

TEST(InteractingHamiltonian, Reductions) {
  const Vec3 p{0.3, -0.2, 0.1};
  EXPECT_NEAR(interacting_hamiltonian(-1.0, p, {}), vacuum_free_hamiltonian(-1.0, p), 1e-15);
  EXPECT_NEAR(interacting_hamiltonian(-1.5, {0.2, 0.0, 0.0}, {-0.2, 0.0, 0.0}), -1.5, 1e-15);
  EXPECT_NEAR(interacting_energy(-2.0, {}, {}), 2.0, 1e-15);
  EXPECT_NEAR(interacting_energy(-1.0, p, {}), total_energy(-1.0, p), 1e-15);
  EXPECT_EQ(code_of([] { interacting_hamiltonian(-1.0, {0.8, 0.0, 0.0}, {0.5, 0.0, 0.0}); }),
            ErrorCode::EnergyDomain);
}

TEST(ClassicalRhs, FreeFlightAndElectrostaticPush) {
  const ForceModel free = model(ModelKind::Classical, PotentialField::uniform(-1.0));
  const ParticleState s = make_initial_state(free, {}, {0.3, 0.0, 0.0});
  EXPECT_EQ(classical_rhs(s, free).dp, Vec3{});

  // Uniform E along x from a ramped vector potential: E = -dA/dt.
  ExternalVectorPotential a;
  a.ramp = {-2.0, 0.0, 0.0};
  const ForceModel push = model(ModelKind::Classical, PotentialField::uniform(-1.0, a), {}, 0.5);
  const ParticleState rest = make_initial_state(push, {}, {});
  EXPECT_LT(norm(classical_rhs(rest, push).dp - Vec3{1.0, 0.0, 0.0}), 1e-15);
}

TEST(ConstrainedRhs, FreeFlightAndMultiplier) {
  const ForceModel free = model(ModelKind::Constrained, PotentialField::uniform(-1.0));
  const ParticleState s = make_initial_state(free, {}, {0.0, 0.4, 0.0});
  const ParticleRates r = constrained_rhs(s, free);
  EXPECT_EQ(r.dp, Vec3{});
  EXPECT_EQ(r.dmultiplier, 0.0);

  ParticleState bad = s;
  bad.multiplier = 0.0;
  EXPECT_EQ(code_of([&] { constrained_rhs(bad, free); }), ErrorCode::DegenerateMultiplier);
}

TEST(ConstrainedRhs, MultiplierAndConstraintAlongTrajectory) {
  ExternalVectorPotential a;
  a.ramp = {-0.3, 0.1, 0.0};
  const ForceModel m = model(ModelKind::Constrained, PotentialField::uniform(-1.0, a));
  const Trajectory tr = integrate_particle(m, make_initial_state(m, kR0, kU0), rk4(1e-3, 2000));
  EXPECT_LT(tr.report.find("multiplier_rest_mass")->max_abs_drift, 1e-8);
  EXPECT_LT(tr.report.find("minkowski_norm")->max_abs_drift, 1e-8);
}

TEST(VacuumFreeRhs, UniformWIsStraightLine) {
  const ForceModel m = model(ModelKind::VacuumFree, PotentialField::uniform(-2.0));
  const Vec3 u{0.1, 0.2, -0.3};
  const Trajectory tr = integrate_particle(m, make_initial_state(m, {}, u), rk4(1e-2, 100));
  const ParticleState& last = tr.samples.back().state;
  EXPECT_LT(norm(last.r - u * last.t), 1e-13);
  EXPECT_LT(norm(last.u - u), 1e-15);
}

TEST(VacuumFreeRhs, EnergyAndRestMassConserved) {
  const ForceModel m = model(ModelKind::VacuumFree, coulomb(4.0 * M_PI));
  const Trajectory tr = integrate_particle(m, make_initial_state(m, kR0, kU0), rk4(1e-4, 10000));
  EXPECT_LT(tr.report.find("hamiltonian")->relative_drift, 1e-6);
  EXPECT_LT(tr.report.find("rest_mass")->relative_drift, 1e-6);
  for (const TrajectorySample& s : tr.samples) {
    EXPECT_NEAR(norm(s.state.p + s.state.u * m.field.wbar(s.state.r, s.state.t)), 0.0, 1e-12);
  }
}

TEST(ParameterizationEquivalence, CanonicalTauMatchesForceLawT) {
  const PotentialField f = coulomb(4.0 * M_PI);
  const ForceModel lab = model(ModelKind::VacuumFree, f);
  const ForceModel can = model(ModelKind::VacuumFree, f, Formulation::Canonical);
  // Both sampled on the same proper-time grid.
  const Trajectory a = integrate_particle(lab, make_initial_state(lab, kR0, kU0),
                                          rk4(1e-3, 1000, Clock::Proper));
  const Trajectory b = integrate_particle(can, make_initial_state(can, kR0, kU0),
                                          rk4(1e-3, 1000, Clock::Proper));
  ASSERT_EQ(a.samples.size(), b.samples.size());
  double d = 0.0;
  for (size_t i = 0; i < a.samples.size(); ++i) {
    d = std::max(d, norm(a.samples[i].state.r - b.samples[i].state.r));
    d = std::max(d, std::abs(a.samples[i].state.t - b.samples[i].state.t));
  }
  EXPECT_LT(d, 1e-6);
}

TEST(InteractingRhs, UniformAHasNoExtraForce) {
  ExternalVectorPotential a;
  a.offset = {0.2, 0.1, -0.4};
  const PotentialField f = PotentialField::uniform(-1.0, a);
  EXPECT_EQ(interaction_extra_force(1.0, {0.3, 0.2, 0.1}, f, kR0, 0.0), Vec3{});
}

TEST(InteractingRhs, RestReducesToElectricForce) {
  const PotentialField f = coulomb(4.0 * M_PI, {0.3, 0.0, 0.0});
  const ForceModel m = model(ModelKind::VacuumInteracting, f, {}, 0.7);
  const ParticleState s = make_initial_state(m, kR0, {});
  const Vec3 e = electric_field(f, 0.7, kR0, 0.0);
  const Vec3 dp = interacting_rhs(s, m).dp;
  EXPECT_LT(norm(dp - e * 0.7), 1e-13 * std::max(1.0, norm(dp)));
}

TEST(InteractionExtraForce, SymmetricCaseVanishes) {
  // <u, A> is independent of position when u is orthogonal to every column of grad A.
  ExternalVectorPotential a;
  a.gradient(0, 0) = 1.0;
  a.gradient(0, 2) = -2.0;
  const PotentialField f = PotentialField::uniform(-1.0, a);
  EXPECT_LT(norm(interaction_extra_force(1.0, {0.0, 0.5, 0.0}, f, kR0, 0.0)), 1e-15);
}

TEST(InteractionExtraForce, MatchesFiniteDifferencesRandom) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    ExternalVectorPotential a;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a.gradient(i, j) = d(rng);
    const PotentialField f = coulomb(2.0, {0.2 * d(rng), 0.2 * d(rng), 0.0}, a);
    const Vec3 r{2.0 + d(rng), d(rng), d(rng)};
    const Vec3 u = Vec3{d(rng), d(rng), d(rng)} * 0.5;
    const double q = 0.5 + 0.5 * std::abs(d(rng));
    const Vec3 fc = interaction_extra_force(q, u, f, r, 0.1);
    const double h = 1e-5;
    for (int i = 0; i < 3; ++i) {
      Vec3 e;
      e[i] = h;
      const double num = -q * (dot(u, f.vecpot(r + e, 0.1)) - dot(u, f.vecpot(r - e, 0.1))) / (2 * h);
      EXPECT_LT(std::abs(num - fc[i]), 1e-6 * std::max(1.0, norm(fc)));
    }
  }
}

TEST(InteractingCanonical, HamiltonianConserved) {
  TwoParticleScenario sc;
  sc.q_f = 4.0 * M_PI;
  sc.u_f = {0.3, 0.0, 0.0};
  const ForceModel m = sc.model(Formulation::Canonical);
  const Trajectory tr = integrate_particle(m, make_initial_state(m, kR0, {0.4, 0.2, 0.0}),
                                          rk4(1e-4, 10000, Clock::Proper));
  EXPECT_LT(tr.report.find("hamiltonian")->relative_drift, 1e-5);
}

TEST(RestMassLimit, DeviationFirstOrderInCharge) {
  ExternalVectorPotential a;
  a.ramp = {0.5, 0.0, 0.0};
  const ForceModel base = model(ModelKind::VacuumInteracting, coulomb(4.0 * M_PI, {}, a));
  const RestMassLimitReport rep =
      rest_mass_limit_check(base, kR0, kU0, {1e-2, 5e-3, 2.5e-3}, 1e-3, 1000);
  ASSERT_EQ(rep.ratios.size(), 2u);
  for (double r : rep.ratios) EXPECT_NEAR(r, 0.5, 0.1);
  EXPECT_NEAR(rep.order, 1.0, 0.2);
}

TEST(RestMassLimit, UniformWHasNoDeviation) {
  ExternalVectorPotential a;
  a.offset = {0.1, 0.0, 0.0};
  const ForceModel base = model(ModelKind::VacuumInteracting, PotentialField::uniform(-1.0, a));
  const RestMassLimitReport rep = rest_mass_limit_check(base, kR0, kU0, {1e-1, 1e-2}, 1e-3, 500);
  for (const RestMassLimitEntry& e : rep.entries) EXPECT_LT(e.max_deviation, 1e-12);
}

TEST(ModelAgreement, ClassicalLimitLinearInCharge) {
  ExternalVectorPotential a;
  a.ramp = {0.5, 0.0, 0.0};
  const PotentialField f = coulomb(4.0 * M_PI, {}, a);
  const double m0 = -f.wbar(kR0, 0.0) * std::sqrt(1.0 - norm2(kU0));
  double prev = 0.0;
  for (double q : {1e-4, 1e-5}) {
    const ForceModel mi = model(ModelKind::VacuumInteracting, f, {}, q);
    const ForceModel mc = model(ModelKind::Classical, f, {}, q, m0);
    const Trajectory ti = integrate_particle(mi, make_initial_state(mi, kR0, kU0), rk4(1e-3, 500));
    const Trajectory tc = integrate_particle(mc, make_initial_state(mc, kR0, kU0), rk4(1e-3, 500));
    double d = 0.0;
    for (size_t i = 0; i < ti.samples.size(); ++i)
      d = std::max(d, norm(ti.samples[i].state.r - tc.samples[i].state.r));
    if (prev > 0.0) EXPECT_NEAR(prev / d, 10.0, 2.0);
    prev = d;
  }
}

TEST(ActionStationarity, RandomSmoothPerturbations) {
  const PotentialField f = coulomb(4.0 * M_PI);
  const ForceModel m = model(ModelKind::VacuumFree, f);
  const Trajectory tr = integrate_particle(m, make_initial_state(m, kR0, kU0),
                                          rk4(1e-3, 500, Clock::Proper));
  DiscretePath path;
  for (const TrajectorySample& s : tr.samples) {
    path.r.push_back(s.state.r);
    path.t.push_back(s.state.t);
  }
  path.s0 = tr.samples.front().state.tau;
  path.s1 = tr.samples.back().state.tau;
  LagrangianSpec spec;
  spec.kind = LagrangianKind::VacuumFreePoint;
  spec.field = f;

  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const int n = path.size();
  for (int k = 0; k < 100; ++k) {
    // Low sine modes vanishing at both ends.
    const int mode = 1 + k % 4;
    const Vec3 dir{d(rng), d(rng), d(rng)};
    const double amp = 1e-4;
    DiscretePath plus = path, minus = path;
    for (int i = 0; i < n; ++i) {
      const double w = std::sin(mode * M_PI * i / (n - 1.0)) * amp;
      plus.r[i] += dir * w;
      minus.r[i] -= dir * w;
    }
    const double s = discrete_action(spec, path);
    const double first = (discrete_action(spec, plus) - discrete_action(spec, minus)) / (2 * amp);
    const double second = (discrete_action(spec, plus) + discrete_action(spec, minus) - 2 * s);
    // Stationary path: at this amplitude the action changes at second order,
    // the linear part stays at discretization level.
    EXPECT_LT(std::abs(first), 1e-4) << "mode " << mode;
    EXPECT_LT(std::abs(first) * amp, 0.1 * std::abs(second)) << "mode " << mode;
  }
}
