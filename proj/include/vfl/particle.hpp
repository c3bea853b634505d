#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vfl/geometry.hpp"
#include "vfl/potentials.hpp"

namespace vfl {

enum class ModelKind { Classical, Constrained, VacuumFree, VacuumInteracting };

// ForceLaw models evolve in lab time t. Canonical models evolve in proper
// time tau through Hamilton's equations and exist for the two vacuum kinds.
enum class Formulation { ForceLaw, Canonical };

std::string_view to_string(ModelKind kind);
std::string_view to_string(Formulation formulation);

struct ForceModel {
  ModelKind kind = ModelKind::VacuumFree;
  Formulation formulation = Formulation::ForceLaw;
  PotentialField field;
  // Couples the test charge to A. W itself already carries q (W = q phi).
  double charge = 1.0;
  // m0 for Classical and Constrained; derived from the initial state otherwise.
  double rest_mass = 1.0;
};

// Snapshot of one particle. p is the momentum of the active model: m0 gamma u
// (Classical), lambda tdot u (Constrained), -W u (vacuum ForceLaw), or the
// generalized momentum P = p + qA for the canonical interacting model.
struct ParticleState {
  double tau = 0.0;
  double t = 0.0;
  Vec3 r;
  Vec3 u;
  Vec3 p;
  double multiplier = 0.0;  // lambda * dt/dtau, Constrained only
  double rest_mass = 0.0;
};

// Derivatives with respect to the model's own evolution parameter: t for
// ForceLaw formulations (dt == 1), tau for Canonical ones (dtau == 1).
struct ParticleRates {
  Vec3 dr;
  Vec3 dp;
  double dmultiplier = 0.0;
  double dtau = 0.0;
  double dt = 0.0;
};

struct NamedValue {
  std::string name;
  double value = 0.0;
};

// Test charge q moving near a source q_f in uniform motion.
struct TwoParticleScenario {
  double q = 1.0;
  double q_f = 1.0;
  Vec3 r_f0;
  Vec3 u_f;
  double softening = kDefaultSoftening;
  ParticleState initial;

  PotentialField field() const;
  ForceModel model(Formulation formulation = Formulation::ForceLaw) const;
  // eta_f = (tau, r - r_f(t)).
  EuclideanEvent relative_event_of(const ParticleState& s) const;
};

Vec3 classical_momentum(double m0, const Vec3& u);
// m = -W; throws NonpositiveMass for W >= 0.
double dynamic_mass(double wbar);
Vec3 vacuum_momentum(double wbar, const Vec3& u);

ParticleRates classical_rhs(const ParticleState& s, const ForceModel& model);
ParticleRates constrained_rhs(const ParticleState& s, const ForceModel& model);
ParticleRates vacuum_free_rhs(const ParticleState& s, const ForceModel& model);
ParticleRates interacting_rhs(const ParticleState& s, const ForceModel& model);
// Hamilton's equations in tau for H = -(W^2 - p^2)^{1/2}.
ParticleRates vacuum_free_canonical_rhs(const ParticleState& s, const ForceModel& model);
// Hamilton's equations in tau for the interacting Hamiltonian, read as
// dr/dtau = dH/dP, dP/dtau = -dH/dr in the source rest frame.
ParticleRates interacting_canonical_rhs(const ParticleState& s, const ForceModel& model);
ParticleRates model_rhs(const ParticleState& s, const ForceModel& model);

// -q grad <u, A> with u held fixed under the gradient.
Vec3 interaction_extra_force(double q, const Vec3& u, const PotentialField& f, const Vec3& r,
                             double t);

double vacuum_free_hamiltonian(double wbar, const Vec3& p);
double total_energy(double wbar, const Vec3& p);
double interacting_hamiltonian(double wbar, const Vec3& p, const Vec3& qa);
double interacting_energy(double wbar, const Vec3& p, const Vec3& qa);
// sqrt(m0^2 + |P - qA|^2) + W for canonical momentum P.
double classical_hamiltonian(double m0, double wbar, const Vec3& canonical_p, const Vec3& qa);
// Legendre transform of the multiplier Lagrangian in rdot at fixed tdot.
double constrained_hamiltonian(double multiplier, double m0, double wbar, double tdot,
                               const Vec3& canonical_p, const Vec3& qa);

// Builds a consistent state (momentum, multiplier, rest mass) from r, u.
ParticleState make_initial_state(const ForceModel& model, const Vec3& r, const Vec3& u,
                                 double t = 0.0, double tau = 0.0);
// Recomputes u from the evolved variables.
void refresh_velocity(ParticleState& s, const ForceModel& model);
// The quantities the model claims constant along its trajectories.
std::vector<NamedValue> conserved_quantities(const ParticleState& s, const ForceModel& model);
// Energy column reported in trajectory CSV files.
double reported_energy(const ParticleState& s, const ForceModel& model);
// q A at the particle location for the active model.
Vec3 coupled_vecpot(const ParticleState& s, const ForceModel& model);
// m0 estimate -W (1 - u^2)^{1/2}.
double vacuum_rest_mass(const ParticleState& s, const PotentialField& f);

struct RestMassLimitEntry {
  double charge = 0.0;
  double max_deviation = 0.0;  // max |(-W)(1-u^2)^{1/2} - m0|
};

struct RestMassLimitReport {
  std::vector<RestMassLimitEntry> entries;
  // ratios[i] = deviation(i+1) / deviation(i)
  std::vector<double> ratios;
  double order = 0.0;  // least-squares log-log slope of deviation vs q
};

// Integrates the interacting ForceLaw model for each charge of a decreasing
// sequence and measures how far -W stays from m0 (1-u^2)^{-1/2}.
RestMassLimitReport rest_mass_limit_check(const ForceModel& base, const Vec3& r0, const Vec3& u0,
                                          const std::vector<double>& charges, double step,
                                          long n_steps);

}  // namespace vfl
