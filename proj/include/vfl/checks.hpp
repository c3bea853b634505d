#pragma once

#include <string>
#include <vector>

namespace vfl::checks {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

CriterionResult rest_mass_recovery();          // 1
CriterionResult hamiltonian_conservation();    // 2
CriterionResult classical_limit();             // 3
CriterionResult contact_force_oracle();        // 4
CriterionResult constrained_multiplier();      // 5
CriterionResult variational_cross_check();     // 6
CriterionResult gyro_orbit();                  // 7
CriterionResult string_conservation();         // 8
CriterionResult conformal_solver();            // 9
CriterionResult hamiltonian_functional_gap();  // 10
// 11; suite_seconds is the run time of the other criteria.
CriterionResult determinism_and_format(double suite_seconds);

// Runs all criteria in order.
std::vector<CriterionResult> run_all();

std::string format_line(const CriterionResult& r);

}  // namespace vfl::checks
