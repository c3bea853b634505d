#include <cmath>

#include "vfl/errors.hpp"
#include "vfl/integrate.hpp"
#include "vfl/particle.hpp"

namespace vfl {

RestMassLimitReport rest_mass_limit_check(const ForceModel& base, const Vec3& r0, const Vec3& u0,
                                          const std::vector<double>& charges, double step,
                                          long n_steps) {
  if (charges.size() < 2) {
    throw PhysicsError(ErrorCode::InvalidInput, "the limit check needs at least two charges");
  }
  for (size_t i = 0; i < charges.size(); ++i) {
    if (charges[i] == 0.0) throw PhysicsError(ErrorCode::ZeroCharge, "charge sequence contains 0");
    if (i > 0 && !(std::abs(charges[i]) < std::abs(charges[i - 1]))) {
      throw PhysicsError(ErrorCode::InvalidInput, "charges must decrease in magnitude");
    }
  }

  IntegrationParams params;
  params.step = step;
  params.n_steps = n_steps;
  params.audit_every = 1;

  RestMassLimitReport report;
  for (double q : charges) {
    ForceModel m = base;
    m.kind = ModelKind::VacuumInteracting;
    m.formulation = Formulation::ForceLaw;
    m.charge = q;
    const ParticleState s0 = make_initial_state(m, r0, u0);
    const double m0 = vacuum_rest_mass(s0, m.field);
    const Trajectory traj = integrate_particle(m, s0, params);
    double worst = 0.0;
    for (const TrajectorySample& s : traj.samples) {
      worst = std::max(worst, std::abs(vacuum_rest_mass(s.state, m.field) - m0));
    }
    report.entries.push_back({q, worst});
  }

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(report.entries.size());
  for (size_t i = 0; i < report.entries.size(); ++i) {
    const RestMassLimitEntry& e = report.entries[i];
    if (i > 0) {
      const double prev = report.entries[i - 1].max_deviation;
      report.ratios.push_back(prev > 0.0 ? e.max_deviation / prev : 0.0);
    }
    const double x = std::log(std::abs(e.charge));
    const double y = std::log(std::max(e.max_deviation, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  report.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return report;
}

}  // namespace vfl
