#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vfl/particle.hpp"
#include "vfl/string_model.hpp"

namespace vfl {

enum class Method { RK4, RK45 };
// Independent variable of an integration: lab time t or proper time tau.
enum class Clock { Lab, Proper };

struct IntegrationParams {
  double step = 1e-3;
  long n_steps = 1000;
  Method method = Method::RK4;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int audit_every = 1;
  Clock clock = Clock::Lab;

  void validate() const;
  double horizon() const { return step * static_cast<double>(n_steps); }
};

struct InvariantStats {
  std::string name;
  double initial = 0.0;
  double max_abs_drift = 0.0;
  double relative_drift = 0.0;
  long samples = 0;
};

struct ConservationReport {
  std::vector<InvariantStats> invariants;
  double softening = 0.0;

  void record(const std::string& name, double value);
  const InvariantStats* find(const std::string& name) const;
};

struct TrajectorySample {
  long step = 0;
  ParticleState state;
};

struct Trajectory {
  Clock clock = Clock::Lab;
  std::vector<TrajectorySample> samples;
  ConservationReport report;
  long rejected_steps = 0;
};

// Advances the model with the chosen clock; both clocks are co-integrated.
// Samples (and conservation audits) are taken every audit_every steps and at
// the end. Deterministic for identical inputs.
Trajectory integrate_particle(const ForceModel& model, const ParticleState& initial,
                              const IntegrationParams& params);

struct StringSample {
  long step = 0;
  StringState state;
};

struct StringTrajectory {
  std::vector<StringSample> samples;
  ConservationReport report;
};

// Fixed-end evolution of the canonical string system, auditing H and the
// transversality defect.
StringTrajectory integrate_string(const StringState& initial, const PotentialField& w,
                                  const IntegrationParams& params);

// Gauss-Seidel/SOR relaxation on a patch. local_solve returns the value a
// node would take to zero its own residual with neighbours frozen; refresh
// (optional) runs before each sweep.
struct NodeRelaxation {
  std::function<EuclideanEvent(const ConformalPatch&, int, int)> local_solve;
  std::function<double(const ConformalPatch&)> max_residual;
  std::function<void(const ConformalPatch&)> refresh;
};

struct RelaxationResult {
  ConformalPatch patch;
  long iterations = 0;
  double final_residual = 0.0;
};

// Throws NoConvergence with the tail of the residual history.
RelaxationResult relax_elliptic(const NodeRelaxation& op, ConformalPatch initial, double tol,
                                long max_iters, double omega = 1.0, int check_every = 10);

}  // namespace vfl
