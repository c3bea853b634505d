#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace vfl {

enum class ErrorCode {
  SuperluminalVelocity,
  ZeroDirection,
  InvalidSource,
  ZeroCharge,
  SingularPoint,
  NonpositiveMass,
  EnergyDomain,
  DegenerateMultiplier,
  DomainError,
  DegenerateLagrangian,
  GaugeViolation,
  NoConvergence,
  InvalidInput,
  StepFailure,
  MisalignedScenarios,
};

std::string_view to_string(ErrorCode code);

// Every numerical failure in the library surfaces as a PhysicsError. The
// optional node index and evolution parameter locate the failure inside a
// grid or along a trajectory.
class PhysicsError : public std::runtime_error {
 public:
  PhysicsError(ErrorCode code, const std::string& what,
               std::optional<int> node = std::nullopt,
               std::optional<double> tau = std::nullopt);

  ErrorCode code() const noexcept { return code_; }
  std::optional<int> node() const noexcept { return node_; }
  std::optional<double> tau() const noexcept { return tau_; }

  PhysicsError at_tau(double tau) const;

 private:
  ErrorCode code_;
  std::optional<int> node_;
  std::optional<double> tau_;
};

}  // namespace vfl
