#include "vfl/particle.hpp"

#include "vfl/errors.hpp"

namespace vfl {

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Classical: return "classical";
    case ModelKind::Constrained: return "constrained";
    case ModelKind::VacuumFree: return "vacuum-free";
    case ModelKind::VacuumInteracting: return "vacuum-interacting";
  }
  return "unknown";
}

std::string_view to_string(Formulation formulation) {
  return formulation == Formulation::ForceLaw ? "force-law" : "canonical";
}

PotentialField TwoParticleScenario::field() const {
  SourceSpec spec;
  spec.kind = u_f == Vec3{} ? SourceKind::CoulombStatic : SourceKind::CoulombComoving;
  spec.strength = q_f;
  spec.position = r_f0;
  spec.velocity = u_f;
  spec.softening = softening;
  return build_potential(spec, q);
}

ForceModel TwoParticleScenario::model(Formulation formulation) const {
  ForceModel m;
  m.kind = ModelKind::VacuumInteracting;
  m.formulation = formulation;
  m.field = field();
  m.charge = q;
  return m;
}

EuclideanEvent TwoParticleScenario::relative_event_of(const ParticleState& s) const {
  return relative_event(s.tau, s.r, r_f0 + u_f * s.t);
}

Vec3 classical_momentum(double m0, const Vec3& u) {
  if (!(m0 > 0.0)) throw PhysicsError(ErrorCode::NonpositiveMass, "rest mass must be positive");
  return u * (m0 / proper_time_factor(u));
}

double dynamic_mass(double wbar) {
  if (!(wbar < 0.0)) {
    throw PhysicsError(ErrorCode::NonpositiveMass,
                       "W = " + std::to_string(wbar) + " gives a nonpositive dynamic mass");
  }
  return -wbar;
}

Vec3 vacuum_momentum(double wbar, const Vec3& u) {
  const double m = dynamic_mass(wbar);
  proper_time_factor(u);
  return u * m;
}

namespace {

// -grad W - q dA/dt + q u x B - q grad<u, A>, assembled term by term.
struct LorentzTerms {
  Vec3 electric;  // q E
  Vec3 magnetic;  // q u x B
  Vec3 contact;   // F_c
};

LorentzTerms lorentz_terms(const ForceModel& model, const Vec3& u, const Vec3& r, double t) {
  const PotentialField& f = model.field;
  const double q = model.charge;
  LorentzTerms terms;
  terms.electric = -f.grad_wbar(r, t) - f.dvecpot_dt(r, t) * q;
  if (f.has_vector_potential()) {
    terms.magnetic = cross(u, magnetic_field(f, r, t)) * q;
    terms.contact = interaction_extra_force(q, u, f, r, t);
  }
  return terms;
}

double checked_sqrt_difference(double a2, double b2, const char* what) {
  const double d = a2 - b2;
  if (!(d > 0.0)) throw PhysicsError(ErrorCode::EnergyDomain, what);
  return std::sqrt(d);
}

}  // namespace

ParticleRates classical_rhs(const ParticleState& s, const ForceModel& model) {
  const double m0 = model.rest_mass;
  const Vec3 u = s.p / std::sqrt(m0 * m0 + norm2(s.p));
  const LorentzTerms f = lorentz_terms(model, u, s.r, s.t);
  ParticleRates rates;
  rates.dr = u;
  rates.dp = f.electric + f.magnetic;
  rates.dtau = proper_time_factor(u);
  rates.dt = 1.0;
  return rates;
}

ParticleRates constrained_rhs(const ParticleState& s, const ForceModel& model) {
  if (!(s.multiplier > 0.0)) {
    throw PhysicsError(ErrorCode::DegenerateMultiplier, "lambda * tdot must stay positive");
  }
  const Vec3 u = s.p / s.multiplier;
  const LorentzTerms f = lorentz_terms(model, u, s.r, s.t);
  ParticleRates rates;
  rates.dr = u;
  rates.dp = f.electric + f.magnetic;
  rates.dmultiplier = dot(f.electric, u);
  rates.dtau = proper_time_factor(u);
  rates.dt = 1.0;
  return rates;
}

ParticleRates vacuum_free_rhs(const ParticleState& s, const ForceModel& model) {
  const PotentialField& f = model.field;
  const double m = dynamic_mass(f.wbar(s.r, s.t));
  const Vec3 u = s.p / m;
  ParticleRates rates;
  rates.dr = u;
  rates.dp = -f.grad_wbar(s.r, s.t);
  rates.dtau = proper_time_factor(u);
  rates.dt = 1.0;
  return rates;
}

ParticleRates interacting_rhs(const ParticleState& s, const ForceModel& model) {
  const PotentialField& f = model.field;
  const double m = dynamic_mass(f.wbar(s.r, s.t));
  const Vec3 u = s.p / m;
  const LorentzTerms terms = lorentz_terms(model, u, s.r, s.t);
  ParticleRates rates;
  rates.dr = u;
  rates.dp = terms.electric + terms.magnetic + terms.contact;
  rates.dtau = proper_time_factor(u - f.source_velocity());
  rates.dt = 1.0;
  return rates;
}

ParticleRates vacuum_free_canonical_rhs(const ParticleState& s, const ForceModel& model) {
  const PotentialField& f = model.field;
  const double w = f.wbar(s.r, s.t);
  dynamic_mass(w);
  const double root = checked_sqrt_difference(w * w, norm2(s.p), "|p| >= |W| in canonical flow");
  ParticleRates rates;
  rates.dr = s.p / root;
  rates.dp = f.grad_wbar(s.r, s.t) * (w / root);
  rates.dtau = 1.0;
  rates.dt = -w / root;
  return rates;
}

ParticleRates interacting_canonical_rhs(const ParticleState& s, const ForceModel& model) {
  const PotentialField& f = model.field;
  if (!f.external().is_zero()) {
    throw PhysicsError(ErrorCode::InvalidInput,
                       "canonical interacting flow uses the induced potential q A = W u_f only");
  }
  const Vec3& uf = f.source_velocity();
  const double w = f.wbar(s.r, s.t);
  dynamic_mass(w);
  const Vec3& big_p = s.p;
  const double root = checked_sqrt_difference(w * w, norm2(big_p), "|P| >= |W| in canonical flow");
  const double s3 = root * root * root;
  const double pc = dot(big_p, uf);
  const Vec3 dh_dp = big_p / root - uf * (w / root) - big_p * (w * pc / s3);
  const double dh_dw = -w / root - pc / root + w * w * pc / s3;
  ParticleRates rates;
  rates.dt = -w / root;
  rates.dr = dh_dp + uf * rates.dt;
  rates.dp = -f.grad_wbar(s.r, s.t) * dh_dw;
  rates.dtau = 1.0;
  return rates;
}

ParticleRates model_rhs(const ParticleState& s, const ForceModel& model) {
  if (model.formulation == Formulation::Canonical) {
    switch (model.kind) {
      case ModelKind::VacuumFree: return vacuum_free_canonical_rhs(s, model);
      case ModelKind::VacuumInteracting: return interacting_canonical_rhs(s, model);
      default:
        throw PhysicsError(ErrorCode::InvalidInput,
                           std::string("no canonical formulation for ") +
                               std::string(to_string(model.kind)));
    }
  }
  switch (model.kind) {
    case ModelKind::Classical: return classical_rhs(s, model);
    case ModelKind::Constrained: return constrained_rhs(s, model);
    case ModelKind::VacuumFree: return vacuum_free_rhs(s, model);
    case ModelKind::VacuumInteracting: return interacting_rhs(s, model);
  }
  throw PhysicsError(ErrorCode::InvalidInput, "unknown model kind");
}

Vec3 interaction_extra_force(double q, const Vec3& u, const PotentialField& f, const Vec3& r,
                             double t) {
  // grad <u, A> with u frozen is J^T u.
  return f.grad_vecpot(r, t).transposed() * u * -q;
}

double vacuum_free_hamiltonian(double wbar, const Vec3& p) {
  const double d = wbar * wbar - norm2(p);
  if (d < 0.0) throw PhysicsError(ErrorCode::EnergyDomain, "|p| exceeds |W|");
  return -std::sqrt(d);
}

double total_energy(double wbar, const Vec3& p) { return -vacuum_free_hamiltonian(wbar, p); }

double interacting_hamiltonian(double wbar, const Vec3& p, const Vec3& qa) {
  const Vec3 big_p = p + qa;
  const double root = checked_sqrt_difference(wbar * wbar, norm2(big_p), "|p + qA| >= |W|");
  return -root - dot(big_p, qa) / root;
}

double interacting_energy(double wbar, const Vec3& p, const Vec3& qa) {
  return -interacting_hamiltonian(wbar, p, qa);
}

double classical_hamiltonian(double m0, double wbar, const Vec3& canonical_p, const Vec3& qa) {
  return std::sqrt(m0 * m0 + norm2(canonical_p - qa)) + wbar;
}

double constrained_hamiltonian(double multiplier, double m0, double wbar, double tdot,
                               const Vec3& canonical_p, const Vec3& qa) {
  const double k2 = norm2(canonical_p - qa);
  return tdot * std::sqrt(multiplier * multiplier + k2) + wbar * tdot + (m0 - multiplier);
}

Vec3 coupled_vecpot(const ParticleState& s, const ForceModel& model) {
  return model.field.vecpot(s.r, s.t) * model.charge;
}

double vacuum_rest_mass(const ParticleState& s, const PotentialField& f) {
  return -f.wbar(s.r, s.t) * std::sqrt(std::max(0.0, 1.0 - norm2(s.u)));
}

ParticleState make_initial_state(const ForceModel& model, const Vec3& r, const Vec3& u, double t,
                                 double tau) {
  if (!is_finite(r) || !is_finite(u)) {
    throw PhysicsError(ErrorCode::InvalidInput, "non-finite initial state");
  }
  ParticleState s;
  s.r = r;
  s.u = u;
  s.t = t;
  s.tau = tau;
  const double gamma_inv = proper_time_factor(u);
  const PotentialField& f = model.field;
  switch (model.kind) {
    case ModelKind::Classical:
      s.rest_mass = model.rest_mass;
      s.p = classical_momentum(model.rest_mass, u);
      break;
    case ModelKind::Constrained:
      if (!(model.rest_mass > 0.0)) {
        throw PhysicsError(ErrorCode::NonpositiveMass, "rest mass must be positive");
      }
      s.rest_mass = model.rest_mass;
      // lambda = m0 / ((1-u0^2)^{1/2} tdot0) with tdot0 = (1-u0^2)^{-1/2}.
      s.multiplier = model.rest_mass / gamma_inv;
      s.p = u * s.multiplier;
      break;
    case ModelKind::VacuumFree:
    case ModelKind::VacuumInteracting: {
      const double w = f.wbar(r, t);
      s.p = vacuum_momentum(w, u);
      s.rest_mass = -w * gamma_inv;
      if (model.kind == ModelKind::VacuumInteracting && model.formulation == Formulation::Canonical) {
        s.p = (u - f.source_velocity()) * -w;
      }
      break;
    }
  }
  return s;
}

void refresh_velocity(ParticleState& s, const ForceModel& model) {
  switch (model.kind) {
    case ModelKind::Classical: {
      const double m0 = model.rest_mass;
      s.u = s.p / std::sqrt(m0 * m0 + norm2(s.p));
      return;
    }
    case ModelKind::Constrained:
      s.u = s.p / s.multiplier;
      return;
    case ModelKind::VacuumFree:
      s.u = s.p / -model.field.wbar(s.r, s.t);
      return;
    case ModelKind::VacuumInteracting:
      if (model.formulation == Formulation::Canonical) {
        const ParticleRates rates = interacting_canonical_rhs(s, model);
        s.u = rates.dr / rates.dt;
      } else {
        s.u = s.p / -model.field.wbar(s.r, s.t);
      }
      return;
  }
}

std::vector<NamedValue> conserved_quantities(const ParticleState& s, const ForceModel& model) {
  const PotentialField& f = model.field;
  const double w = f.wbar(s.r, s.t);
  std::vector<NamedValue> out;
  switch (model.kind) {
    case ModelKind::Classical:
      if (f.is_static()) {
        out.push_back({"energy", std::sqrt(model.rest_mass * model.rest_mass + norm2(s.p)) + w});
      }
      break;
    case ModelKind::Constrained: {
      const double gamma_inv = std::sqrt(std::max(0.0, 1.0 - norm2(s.u)));
      out.push_back({"multiplier_rest_mass", s.multiplier * gamma_inv});
      const double tdot = 1.0 / gamma_inv;
      const Vec3 rdot = s.u * tdot;
      out.push_back({"minkowski_norm", tdot * tdot - norm2(rdot)});
      if (f.is_static()) out.push_back({"energy", s.multiplier + w});
      break;
    }
    case ModelKind::VacuumFree:
      out.push_back({"hamiltonian", vacuum_free_hamiltonian(w, s.p)});
      out.push_back({"rest_mass", vacuum_rest_mass(s, f)});
      break;
    case ModelKind::VacuumInteracting: {
      const Vec3 qa = f.source_velocity() * w;
      if (model.formulation == Formulation::Canonical) {
        out.push_back({"hamiltonian", interacting_hamiltonian(w, s.p - qa, qa)});
      } else {
        const Vec3 cqa = coupled_vecpot(s, model);
        out.push_back({"relative_energy", -vacuum_free_hamiltonian(w, s.p + cqa)});
        out.push_back({"hamiltonian", interacting_hamiltonian(w, s.p, cqa)});
      }
      break;
    }
  }
  return out;
}

double reported_energy(const ParticleState& s, const ForceModel& model) {
  const PotentialField& f = model.field;
  const double w = f.wbar(s.r, s.t);
  switch (model.kind) {
    case ModelKind::Classical:
      return std::sqrt(model.rest_mass * model.rest_mass + norm2(s.p)) + w;
    case ModelKind::Constrained:
      return s.multiplier + w;
    case ModelKind::VacuumFree:
      return total_energy(w, s.p);
    case ModelKind::VacuumInteracting: {
      if (model.formulation == Formulation::Canonical) {
        const Vec3 qa = f.source_velocity() * w;
        return interacting_energy(w, s.p - qa, qa);
      }
      return interacting_energy(w, s.p, coupled_vecpot(s, model));
    }
  }
  return 0.0;
}

}  // namespace vfl
