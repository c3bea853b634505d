#include "vfl/errors.hpp"

namespace vfl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SuperluminalVelocity: return "SuperluminalVelocity";
    case ErrorCode::ZeroDirection: return "ZeroDirection";
    case ErrorCode::InvalidSource: return "InvalidSource";
    case ErrorCode::ZeroCharge: return "ZeroCharge";
    case ErrorCode::SingularPoint: return "SingularPoint";
    case ErrorCode::NonpositiveMass: return "NonpositiveMass";
    case ErrorCode::EnergyDomain: return "EnergyDomain";
    case ErrorCode::DegenerateMultiplier: return "DegenerateMultiplier";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::DegenerateLagrangian: return "DegenerateLagrangian";
    case ErrorCode::GaugeViolation: return "GaugeViolation";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::MisalignedScenarios: return "MisalignedScenarios";
  }
  return "Unknown";
}

PhysicsError::PhysicsError(ErrorCode code, const std::string& what,
                           std::optional<int> node, std::optional<double> tau)
    : std::runtime_error(std::string(to_string(code)) + ": " + what),
      code_(code),
      node_(node),
      tau_(tau) {}

PhysicsError PhysicsError::at_tau(double tau) const {
  PhysicsError e = *this;
  e.tau_ = tau;
  return e;
}

}  // namespace vfl
