#pragma once

#include <string_view>
#include <vector>

#include "vfl/geometry.hpp"
#include "vfl/potentials.hpp"
#include "vfl/string_model.hpp"

namespace vfl {

enum class LagrangianKind {
  ClassicalPoint,          // -m0 (1 - u^2)^{1/2} - W + q <A, u>, parameter t
  ConstrainedPoint,        // -m0 - W tdot + q <A, rdot> - lambda [(tdot^2 - rdot^2)^{1/2} - 1]
  RestFramePoint,          // -W (1 + rdot^2)^{1/2} + q <A, rdot>
  VacuumFreePoint,         // -W (1 + rdot^2)^{1/2}
  VacuumInteractingPoint,  // -W (1 + |rdot - u_f tdot|^2)^{1/2}
  StringDensity,           // -W [r'^2 (1 + rdot^2) - <r', rdot>^2]^{1/2}
};

std::string_view to_string(LagrangianKind kind);

struct LagrangianSpec {
  LagrangianKind kind = LagrangianKind::VacuumFreePoint;
  double rest_mass = 1.0;
  double charge = 1.0;
  double multiplier = 1.0;  // lambda
  PotentialField field;
};

// Uniform parameter grid with node positions. The optional t channel holds
// lab time at every node; without it the parameter doubles as the time
// argument of the potentials.
struct DiscretePath {
  double s0 = 0.0;
  double s1 = 1.0;
  std::vector<Vec3> r;
  std::vector<double> t;

  void validate() const;
  int size() const { return static_cast<int>(r.size()); }
  double spacing() const { return (s1 - s0) / (size() - 1); }
  double parameter(int i) const { return s0 + i * spacing(); }
  bool has_time_channel() const { return !t.empty(); }
};

// Lagrangian of a point kind at one node.
double lagrangian_value(const LagrangianSpec& spec, const Vec3& r, const Vec3& rdot, double t,
                        double tdot);

// Trapezoidal action with central-difference velocities (second-order
// one-sided at the ends).
double discrete_action(const LagrangianSpec& spec, const DiscretePath& path);

// dS/dr_k / h by fourth-order symmetric perturbation of node k. Entries within three nodes
// of either end are left at zero: the one-sided end stencils couple them to
// the endpoint terms.
std::vector<Vec3> euler_lagrange_residual(const LagrangianSpec& spec, const DiscretePath& path);
double max_norm(const std::vector<Vec3>& v);

struct LegendreSample {
  double numeric = 0.0;   // <dL/drdot, rdot> - L
  double particle = 0.0;  // Hamiltonian of the particle module at (r, dL/drdot)
  Vec3 momentum;
};

// Pointwise Legendre comparison at a single state.
LegendreSample legendre_sample(const LagrangianSpec& spec, const Vec3& r, const Vec3& rdot,
                               double t, double tdot);

struct LegendreReport {
  std::vector<LegendreSample> samples;
  double max_abs_error = 0.0;
  bool passed = false;
};

inline constexpr double kLegendreTolerance = 1e-8;

// Throws DegenerateLagrangian for StringDensity.
LegendreReport legendre_transform_check(const LagrangianSpec& spec, const DiscretePath& path);

struct MultiplierReport {
  std::vector<double> lambda;  // m0 / (tdot (1 - u^2)^{1/2}) at the checked nodes
  double mean = 0.0;
  double spread = 0.0;  // max - min
  bool constant = false;
};

// Path parameter is tau; the t channel is required. Derivatives use
// five-point stencils, so the two nodes at either end are skipped.
MultiplierReport multiplier_consistency(const DiscretePath& path, double m0,
                                        double tol = 1e-7);

// String world sheet r(tau_k, sigma_i), rows indexed by tau.
struct StringSheet {
  StringGrid grid;
  double tau0 = 0.0;
  double h_tau = 1e-3;
  std::vector<std::vector<Vec3>> rows;

  void validate() const;
};

double string_sheet_action(const LagrangianSpec& spec, const StringSheet& sheet);
// dS/dr / (h_tau h_sigma) at nodes at least three rows/columns from the edges.
std::vector<std::vector<Vec3>> string_sheet_residual(const LagrangianSpec& spec,
                                                     const StringSheet& sheet);

}  // namespace vfl
