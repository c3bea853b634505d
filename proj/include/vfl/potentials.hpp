#pragma once

#include <functional>

#include "vfl/geometry.hpp"

namespace vfl {

enum class SourceKind { Uniform, CoulombStatic, CoulombComoving };

// Externally prescribed vector potential A(r, t) = offset + ramp * t + gradient * r.
// Spatially uniform when gradient is zero.
struct ExternalVectorPotential {
  Vec3 offset;
  Vec3 ramp;
  Mat3 gradient;

  bool is_zero() const;
};

struct SourceSpec {
  SourceKind kind = SourceKind::Uniform;
  // Uniform: the constant value of W (must be negative). Coulomb kinds: q_f.
  double strength = -1.0;
  Vec3 position;  // r_f(0)
  Vec3 velocity;  // u_f, CoulombComoving only
  double softening = 1e-3;
  ExternalVectorPotential external;
};

inline constexpr double kDefaultSoftening = 1e-3;

// Vacuum potential W (= q phi) and vector potential A with exact
// derivatives. For the comoving Coulomb source the induced potential obeys
// q A = W u_f; any external A is added on top.
class PotentialField {
 public:
  PotentialField() = default;
  static PotentialField uniform(double wbar, const ExternalVectorPotential& external = {});

  double wbar(const Vec3& r, double t) const;
  Vec3 grad_wbar(const Vec3& r, double t) const;
  double dwbar_dt(const Vec3& r, double t) const;
  Mat3 hess_wbar(const Vec3& r, double t) const;
  double d2wbar_dt2(const Vec3& r, double t) const;

  Vec3 vecpot(const Vec3& r, double t) const;
  // J(i, j) = dA_i / dx_j
  Mat3 grad_vecpot(const Vec3& r, double t) const;
  Vec3 dvecpot_dt(const Vec3& r, double t) const;

  SourceKind kind() const { return kind_; }
  Vec3 source_position(double t) const { return source_origin_ + source_velocity_ * t; }
  const Vec3& source_velocity() const { return source_velocity_; }
  double softening() const { return softening_; }
  const ExternalVectorPotential& external() const { return external_; }
  bool has_vector_potential() const { return induced_scale_ != 0.0 || !external_.is_zero(); }
  // True when nothing depends explicitly on t.
  bool is_static() const;
  // Point source with zero softening evaluated (numerically) at its location.
  bool is_singular_at(const Vec3& r, double t) const;

 private:
  friend PotentialField build_potential(const SourceSpec& spec, double test_charge);

  Vec3 displacement(const Vec3& r, double t) const { return r - source_position(t); }

  SourceKind kind_ = SourceKind::Uniform;
  double uniform_value_ = -1.0;
  double coupling_ = 0.0;  // |q q_f| / (4 pi)
  Vec3 source_origin_;
  Vec3 source_velocity_;
  double softening_ = 0.0;
  double induced_scale_ = 0.0;  // 1/q for the comoving source
  ExternalVectorPotential external_;
};

// Throws InvalidSource on a violated SourceSpec invariant.
PotentialField build_potential(const SourceSpec& spec, double test_charge);

struct FieldSample {
  Vec3 e;
  Vec3 b;
};

// E = -q^{-1} grad W - dA/dt. Throws ZeroCharge for q = 0.
Vec3 electric_field(const PotentialField& f, double q, const Vec3& r, double t);
// B = curl A.
Vec3 magnetic_field(const PotentialField& f, const Vec3& r, double t);
FieldSample sample_fields(const PotentialField& f, double q, const Vec3& r, double t);

using ScalarFn = std::function<double(const Vec3&, double)>;

// Scalar field for wave-equation checks. hessian and d2dt2 are optional;
// missing second derivatives fall back to fourth-order central differences.
struct ScalarField {
  ScalarFn value;
  std::function<Mat3(const Vec3&, double)> hessian;
  ScalarFn d2dt2;
  std::function<bool(const Vec3&, double)> singular;
};

ScalarField scalar_field(const PotentialField& f);

// Density that the potential of f solves exactly: d2W/dt2 - lap W. Vanishes
// off the source for zero softening.
ScalarFn source_density(const PotentialField& f);

// d2W/dt2 - lap W - rho at (r, t). Throws SingularPoint on the singular
// support of an unsoftened point source.
double wave_residual(const ScalarField& w, const ScalarFn& rho, const Vec3& r, double t);

}  // namespace vfl
