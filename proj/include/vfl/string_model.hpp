#pragma once

#include <functional>
#include <span>
#include <vector>

#include "vfl/geometry.hpp"
#include "vfl/potentials.hpp"

namespace vfl {

// Uniform grid on [sigma_begin, sigma_end].
struct StringGrid {
  double sigma_begin = 0.0;
  double sigma_end = 1.0;
  int nodes = 64;

  void validate() const;
  double spacing() const { return (sigma_end - sigma_begin) / (nodes - 1); }
  double sigma(int i) const { return sigma_begin + i * spacing(); }
  // Composite trapezoidal weight of node i.
  double weight(int i) const;
};

struct StringState {
  StringGrid grid;
  std::vector<Vec3> r;
  std::vector<Vec3> p;
  double tau = 0.0;

  void validate() const;
};

// dr/dsigma: central differences inside, first-order one-sided at the ends.
std::vector<Vec3> string_tangents(const StringGrid& grid, std::span<const Vec3> r);
// Same stencil applied to any nodal vector field.
std::vector<Vec3> sigma_derivative(const StringGrid& grid, std::span<const Vec3> f);

// W at every node. The potential's time argument is the string's tau.
std::vector<double> sample_wbar(const StringState& s, const PotentialField& f);

// p = -W r'^2 N rdot / [r'^2 (rdot^2 + 1) - <r', rdot>^2]^{1/2}, pointwise.
std::vector<Vec3> string_momentum(const StringGrid& grid, std::span<const Vec3> r,
                                  std::span<const Vec3> rdot, std::span<const double> wbar);

// max_i |<p_i, r'_i>|
double transversality_defect(const StringState& s);

// [(W r')^2 - p^2]^{1/2} at each node; throws EnergyDomain naming the node.
std::vector<double> hamiltonian_density(const StringState& s, std::span<const double> wbar);
// Trapezoidal quadrature of the density above.
double string_hamiltonian(const StringState& s, std::span<const double> wbar);
double string_hamiltonian(const StringState& s, const PotentialField& f);
// Trapezoidal quadrature of |W r' - p|.
double string_hamiltonian_alt(const StringState& s, std::span<const double> wbar);

struct StringRates {
  std::vector<Vec3> dr;
  std::vector<Vec3> dp;
};

// Margin below which (W r')^2 - p^2 counts as leaving the energy domain.
inline constexpr double kStringDomainMargin = 1e-10;

// Hamilton's equations of the sigma-discretized functional with both ends
// held fixed. The flow is generated by the Legendre dual of the string
// Lagrangian, -H; H itself is conserved either way.
StringRates string_canonical_rhs(const StringState& s, const PotentialField& f);

// Lagrangian data for a string driven by a source moving with
// rdot_f = dr_f/dtau; rdot are the node velocities dr/dtau.
struct ChargedStringScenario {
  StringGrid grid;
  std::vector<Vec3> r;
  std::vector<Vec3> rdot;
  Vec3 source_velocity;
  double charge_density = 1.0;
  PotentialField field;
  double tau = 0.0;
  double t = 0.0;
};

struct ChargedStringTerms {
  Vec3 generalized_momentum;  // P
  Vec3 local_momentum;        // p
  Vec3 coupled_vecpot;        // q A
  Vec3 magnetic;              // q rdot x B
  Vec3 contact;               // -q grad <A, rdot>
  Vec3 induction;             // -q dA/dtau
  Vec3 potential;             // -[...]^{1/2} grad W
  Vec3 tension;               // d/dsigma { W [1 + v^2 T_f] r' / [...]^{1/2} }
  Vec3 total;                 // dp/dtau
};

std::vector<ChargedStringTerms> charged_string_rhs(const ChargedStringScenario& sc);
// Electric-type force: induction + potential + tension at one node.
Vec3 string_electric_field(const ChargedStringScenario& sc, int sigma_index);

// Conformal world-surface patch xi(sigma_i, s_j), row-major in sigma.
struct ConformalPatch {
  int n_sigma = 0;
  int n_s = 0;
  double sigma0 = 0.0;
  double s0 = 0.0;
  double h_sigma = 0.0;
  double h_s = 0.0;
  std::vector<EuclideanEvent> xi;

  static ConformalPatch make(int n_sigma, int n_s, double sigma0, double sigma1, double s0,
                             double s1);
  EuclideanEvent& at(int i, int j) { return xi[static_cast<size_t>(j) * n_sigma + i]; }
  const EuclideanEvent& at(int i, int j) const { return xi[static_cast<size_t>(j) * n_sigma + i]; }
  double sigma(int i) const { return sigma0 + i * h_sigma; }
  double s(int j) const { return s0 + j * h_s; }
  bool is_boundary(int i, int j) const {
    return i == 0 || j == 0 || i == n_sigma - 1 || j == n_s - 1;
  }
  void fill(const std::function<EuclideanEvent(double, double)>& g);
  void fill_boundary(const std::function<EuclideanEvent(double, double)>& g);
};

struct GaugeResidual {
  double orthogonality = 0.0;  // max |<xi', xidot>|
  double norm_mismatch = 0.0;  // max |xi'^2 - xidot^2|
};

GaugeResidual gauge_residual(const ConformalPatch& patch);

using SheetForcing = std::function<EuclideanEvent(double sigma, double s)>;

struct ConformalOptions {
  double gauge_tol = 1e-8;
  bool check_gauge = true;
  SheetForcing forcing;  // subtracted from the residual when present
};

// LHS - RHS of d(W xidot)/ds + d(W xi')/dsigma = (xi'^2 xidot^2)^{1/2} grad_xi W
// at interior nodes (boundary entries are zero), W evaluated at xi = (r, tau).
std::vector<EuclideanEvent> conformal_residual(const ConformalPatch& patch, const PotentialField& w,
                                               const ConformalOptions& options = {});
double max_norm(std::span<const EuclideanEvent> v);

struct ConformalSolveOptions {
  long max_iters = 100000;
  double omega = 0.0;  // 0 selects the optimal SOR factor for the Laplacian
  SheetForcing forcing;
};

struct ConformalSolution {
  ConformalPatch patch;
  long iterations = 0;
  double final_residual = 0.0;
};

ConformalSolution solve_conformal(const ConformalPatch& boundary, const PotentialField& w,
                                  double tol, const ConformalSolveOptions& options = {});

}  // namespace vfl
