#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "vfl/errors.hpp"
#include "vfl/integrate.hpp"
#include "vfl/variational.hpp"

using namespace vfl;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const PhysicsError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no PhysicsError";
  return ErrorCode::InvalidInput;
}

LagrangianSpec spec_of(LagrangianKind k, const PotentialField& f = PotentialField::uniform(-1.0)) {
  LagrangianSpec s;
  s.kind = k;
  s.field = f;
  return s;
}

DiscretePath line_path(int m, const Vec3& r0, const Vec3& v, double s0 = 0.0, double s1 = 1.0) {
  DiscretePath p;
  p.s0 = s0;
  p.s1 = s1;
  for (int i = 0; i < m; ++i) p.r.push_back(r0 + v * (s0 + (s1 - s0) * i / (m - 1.0)));
  return p;
}

PotentialField coulomb(double qf, const Vec3& uf = {}) {
  SourceSpec s;
  s.kind = norm2(uf) > 0.0 ? SourceKind::CoulombComoving : SourceKind::CoulombStatic;
  s.strength = qf;
  s.velocity = uf;
  return build_potential(s, 1.0);
}

// Positive root of tdot^2 = 1 + |rdot - u_f tdot|^2, the clock on which the
// interacting Lagrangian reproduces its Hamiltonian.
double comoving_tdot(const Vec3& rdot, const Vec3& uf) {
  const double a = 1.0 - norm2(uf), b = dot(rdot, uf);
  return (-b + std::sqrt(b * b + a * (1.0 + norm2(rdot)))) / a;
}

}  // namespace

TEST(DiscretePath, Validation) {
  DiscretePath p = line_path(4, {}, {});
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::InvalidInput);
  p = line_path(6, {}, {});
  p.t = {0.0, 1.0};
  EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::InvalidInput);
}

TEST(DiscreteAction, StaticPath) {
  const LagrangianSpec s = spec_of(LagrangianKind::VacuumFreePoint);
  EXPECT_NEAR(discrete_action(s, line_path(11, {0.3, 0.0, 0.0}, {})), 1.0, 1e-14);
}

TEST(DiscreteAction, UniformVelocity) {
  const LagrangianSpec s = spec_of(LagrangianKind::VacuumFreePoint);
  const double v = 0.7;
  EXPECT_NEAR(discrete_action(s, line_path(11, {}, {0.0, v, 0.0}, 0.0, 2.0)),
              2.0 * std::sqrt(1 + v * v), 1e-13);
}

TEST(DiscreteAction, SecondOrderRefinement) {
  const LagrangianSpec s = spec_of(LagrangianKind::VacuumFreePoint, coulomb(4.0 * M_PI));
  auto action = [&](int m) {
    DiscretePath p;
    p.s0 = 0.0;
    p.s1 = 1.0;
    for (int i = 0; i < m; ++i) {
      const double x = i / (m - 1.0);
      p.r.push_back({1.0 + 0.2 * std::sin(x), 0.5 * x, 0.1 * x * x});
    }
    return discrete_action(s, p);
  };
  const double a = action(41), b = action(81), c = action(161);
  EXPECT_NEAR(std::abs(a - b) / std::abs(b - c), 4.0, 0.6);
}

TEST(EulerLagrange, FreeMotionIsStationary) {
  const LagrangianSpec s = spec_of(LagrangianKind::VacuumFreePoint);
  const std::vector<Vec3> res = euler_lagrange_residual(s, line_path(41, {1.0, 2.0, 3.0}, {0.3, -0.4, 0.5}));
  EXPECT_LT(max_norm(res), 1e-7);
}

TEST(EulerLagrange, DisplacedNodeRestores) {
  const LagrangianSpec s = spec_of(LagrangianKind::VacuumFreePoint);
  DiscretePath p = line_path(21, {}, {0.5, 0.0, 0.0});
  const Vec3 kick{0.0, 0.01, 0.0};
  p.r[10] += kick;
  const std::vector<Vec3> res = euler_lagrange_residual(s, p);
  int peak = 0;
  for (int i = 0; i < 21; ++i)
    if (norm(res[i]) > norm(res[peak])) peak = i;
  EXPECT_EQ(peak, 10);
  // dS/dr points along the displacement, so descending the action pulls the node back.
  EXPECT_GT(dot(res[10], kick), 0.0);
}

TEST(EulerLagrange, EndNodesUntouched) {
  const LagrangianSpec s = spec_of(LagrangianKind::VacuumFreePoint, coulomb(4.0 * M_PI));
  DiscretePath p = line_path(20, {1.0, 0.0, 0.0}, {0.0, 0.3, 0.0});
  const std::vector<Vec3> res = euler_lagrange_residual(s, p);
  for (int i : {0, 1, 2, 17, 18, 19}) EXPECT_EQ(res[i], Vec3{});
  EXPECT_GT(norm(res[5]), 0.0);
}

TEST(EulerLagrange, IntegratedTrajectoriesSecondOrder) {
  struct Case {
    ModelKind model;
    LagrangianKind lagrangian;
    Clock clock;
    PotentialField field;
  };
  const Case cases[] = {
      {ModelKind::Classical, LagrangianKind::ClassicalPoint, Clock::Lab, coulomb(4.0 * M_PI)},
      {ModelKind::Constrained, LagrangianKind::ConstrainedPoint, Clock::Proper, coulomb(4.0 * M_PI)},
      {ModelKind::VacuumFree, LagrangianKind::VacuumFreePoint, Clock::Proper, coulomb(4.0 * M_PI)},
      {ModelKind::VacuumInteracting, LagrangianKind::VacuumInteractingPoint, Clock::Proper,
       coulomb(4.0 * M_PI, {0.2, 0.0, 0.0})}};
  for (const Case& c : cases) {
    double res[2];
    for (int k = 0; k < 2; ++k) {
      const double h = k == 0 ? 1e-3 : 5e-4;
      ForceModel m;
      m.kind = c.model;
      m.field = c.field;
      IntegrationParams p;
      p.step = h;
      p.n_steps = std::lround(0.5 / h);
      p.clock = c.clock;
      const Trajectory tr = integrate_particle(m, make_initial_state(m, {1.0, 0.0, 0.0}, {0.0, 0.5, 0.0}), p);
      DiscretePath path;
      for (const TrajectorySample& s : tr.samples) {
        path.r.push_back(s.state.r);
        if (c.clock == Clock::Proper) path.t.push_back(s.state.t);
      }
      const bool by_t = c.clock == Clock::Lab;
      path.s0 = by_t ? tr.samples.front().state.t : tr.samples.front().state.tau;
      path.s1 = by_t ? tr.samples.back().state.t : tr.samples.back().state.tau;
      res[k] = max_norm(euler_lagrange_residual(spec_of(c.lagrangian, c.field), path));
    }
    EXPECT_LT(res[1], 1e-5) << to_string(c.lagrangian);
    EXPECT_NEAR(std::log2(res[0] / res[1]), 2.0, 0.3) << to_string(c.lagrangian);
  }
}

TEST(Legendre, RandomStatesEveryKind) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  ExternalVectorPotential a;
  a.offset = {0.1, -0.2, 0.05};
  SourceSpec src;
  src.kind = SourceKind::CoulombStatic;
  src.strength = 4.0 * M_PI;
  src.external = a;
  const PotentialField with_a = build_potential(src, 1.0);
  const PotentialField moving = coulomb(4.0 * M_PI, {0.3, 0.0, 0.0});
  const LagrangianKind kinds[] = {LagrangianKind::ClassicalPoint, LagrangianKind::ConstrainedPoint,
                                  LagrangianKind::RestFramePoint, LagrangianKind::VacuumFreePoint,
                                  LagrangianKind::VacuumInteractingPoint};
  for (LagrangianKind k : kinds) {
    LagrangianSpec s = spec_of(k, k == LagrangianKind::VacuumInteractingPoint ? moving : with_a);
    s.charge = 0.7;
    s.rest_mass = 1.3;
    s.multiplier = 1.1;
    for (int n = 0; n < 100; ++n) {
      const Vec3 r{1.0 + d(rng), d(rng), d(rng)};
      const bool lab = k == LagrangianKind::ClassicalPoint;
      // Lab velocities stay subluminal; proper-time velocities are unbounded.
      const Vec3 rdot = Vec3{d(rng), d(rng), d(rng)} * (lab ? 0.5 : 1.5);
      double tdot = std::sqrt(1 + norm2(rdot));
      if (k == LagrangianKind::ConstrainedPoint) tdot *= 1 + 0.1 * d(rng);
      if (k == LagrangianKind::VacuumInteractingPoint) tdot = comoving_tdot(rdot, moving.source_velocity());
      const LegendreSample ls = legendre_sample(s, r, rdot, 0.0, tdot);
      EXPECT_NEAR(ls.numeric, ls.particle, kLegendreTolerance) << to_string(k);
    }
  }
}

TEST(Legendre, InteractingReducesToVacuumFree) {
  const PotentialField f = coulomb(4.0 * M_PI);
  const Vec3 r{1.0, 0.2, 0.0}, rdot{0.3, 0.4, 0.0};
  const double tdot = std::sqrt(1 + norm2(rdot));
  const LegendreSample a = legendre_sample(spec_of(LagrangianKind::VacuumInteractingPoint, f), r, rdot, 0.0, tdot);
  const LegendreSample b = legendre_sample(spec_of(LagrangianKind::VacuumFreePoint, f), r, rdot, 0.0, tdot);
  EXPECT_NEAR(a.numeric, b.numeric, 1e-9);
  EXPECT_NEAR(a.particle, b.particle, 1e-9);
}

TEST(Legendre, StringDensityDegenerate) {
  const LagrangianSpec s = spec_of(LagrangianKind::StringDensity);
  EXPECT_EQ(code_of([&] { legendre_transform_check(s, line_path(6, {}, {0.1, 0.0, 0.0})); }),
            ErrorCode::DegenerateLagrangian);
}

TEST(Legendre, PathReport) {
  const LagrangianSpec s = spec_of(LagrangianKind::VacuumFreePoint, coulomb(4.0 * M_PI));
  const LegendreReport rep = legendre_transform_check(s, line_path(12, {1.0, 0.0, 0.0}, {0.0, 0.8, 0.0}));
  EXPECT_TRUE(rep.passed);
  EXPECT_EQ(rep.samples.size(), 12u);
}

TEST(Multiplier, FreeMotionExact) {
  DiscretePath p = line_path(21, {}, {0.3, 0.2, 0.0});
  for (int i = 0; i < 21; ++i) p.t.push_back(std::sqrt(1 + 0.13) * p.parameter(i));
  const MultiplierReport rep = multiplier_consistency(p, 2.0, 1e-10);
  EXPECT_TRUE(rep.constant);
  EXPECT_NEAR(rep.mean, 2.0, 1e-12);
}

TEST(Multiplier, IntegratedUniformE) {
  ExternalVectorPotential a;
  a.ramp = {-0.2, 0.1, 0.0};
  ForceModel m;
  m.kind = ModelKind::Constrained;
  m.field = PotentialField::uniform(-1.0, a);
  m.rest_mass = 1.0;
  IntegrationParams p;
  p.step = 1e-3;
  p.n_steps = 1000;
  p.clock = Clock::Proper;
  const Trajectory tr = integrate_particle(m, make_initial_state(m, {}, {0.0, 0.5, 0.0}), p);
  DiscretePath path;
  for (const TrajectorySample& s : tr.samples) {
    path.r.push_back(s.state.r);
    path.t.push_back(s.state.t);
  }
  path.s0 = tr.samples.front().state.tau;
  path.s1 = tr.samples.back().state.tau;
  EXPECT_TRUE(multiplier_consistency(path, 1.0, 1e-7).constant);
}

TEST(Multiplier, ConstraintViolationFlagged) {
  DiscretePath p = line_path(21, {}, {0.3, 0.0, 0.0});
  // t grows quadratically, so tdot^2 - rdot^2 is not constant.
  for (int i = 0; i < 21; ++i) {
    const double s = p.parameter(i);
    p.t.push_back(1.2 * s + 0.5 * s * s);
  }
  EXPECT_FALSE(multiplier_consistency(p, 1.0).constant);
  DiscretePath no_t = line_path(21, {}, {});
  EXPECT_EQ(code_of([&] { multiplier_consistency(no_t, 1.0); }), ErrorCode::InvalidInput);
}

TEST(StringSheet, StraightStaticSheetIsStationary) {
  StringSheet sh;
  sh.grid.nodes = 12;
  sh.h_tau = 1e-2;
  for (int k = 0; k < 9; ++k) {
    std::vector<Vec3> row;
    for (int i = 0; i < 12; ++i) row.push_back({sh.grid.sigma(i), 0.0, 0.0});
    sh.rows.push_back(row);
  }
  const LagrangianSpec s = spec_of(LagrangianKind::StringDensity);
  // Action of a unit static string over a tau span of 8 h_tau.
  EXPECT_NEAR(string_sheet_action(s, sh), 0.08, 1e-12);
  for (const auto& row : string_sheet_residual(s, sh))
    for (const Vec3& v : row) EXPECT_LT(norm(v), 1e-6);
  sh.rows.resize(6);
  EXPECT_EQ(code_of([&] { sh.validate(); }), ErrorCode::InvalidInput);
}
