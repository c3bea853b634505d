#include "vfl/potentials.hpp"

#include <numbers>

#include "vfl/errors.hpp"

namespace vfl {

namespace {

constexpr double kSingularRadius = 1e-9;

bool is_zero_matrix(const Mat3& m) {
  for (const auto& row : m.m)
    for (double v : row)
      if (v != 0.0) return false;
  return true;
}

}  // namespace

bool ExternalVectorPotential::is_zero() const {
  return offset == Vec3{} && ramp == Vec3{} && is_zero_matrix(gradient);
}

PotentialField PotentialField::uniform(double wbar, const ExternalVectorPotential& external) {
  SourceSpec spec;
  spec.kind = SourceKind::Uniform;
  spec.strength = wbar;
  spec.external = external;
  return build_potential(spec, 1.0);
}

PotentialField build_potential(const SourceSpec& spec, double test_charge) {
  if (!std::isfinite(spec.strength) || !std::isfinite(spec.softening) ||
      !is_finite(spec.position) || !is_finite(spec.velocity)) {
    throw PhysicsError(ErrorCode::InvalidSource, "non-finite source parameters");
  }
  if (spec.softening < 0.0) {
    throw PhysicsError(ErrorCode::InvalidSource, "softening must be non-negative");
  }
  PotentialField f;
  f.kind_ = spec.kind;
  f.external_ = spec.external;
  switch (spec.kind) {
    case SourceKind::Uniform:
      if (!(spec.strength < 0.0)) {
        throw PhysicsError(ErrorCode::InvalidSource,
                           "uniform W must be negative so that the dynamic mass -W is positive");
      }
      f.uniform_value_ = spec.strength;
      return f;
    case SourceKind::CoulombStatic:
    case SourceKind::CoulombComoving:
      break;
  }
  if (spec.strength == 0.0 || test_charge == 0.0 || !std::isfinite(test_charge)) {
    throw PhysicsError(ErrorCode::InvalidSource,
                       "Coulomb source needs nonzero source and test charges");
  }
  if (spec.kind == SourceKind::CoulombStatic && spec.velocity != Vec3{}) {
    throw PhysicsError(ErrorCode::InvalidSource, "static Coulomb source with nonzero velocity");
  }
  if (spec.kind == SourceKind::CoulombComoving) {
    if (!(norm2(spec.velocity) < 1.0)) {
      throw PhysicsError(ErrorCode::InvalidSource, "comoving source needs |u_f| < 1");
    }
    f.source_velocity_ = spec.velocity;
    f.induced_scale_ = 1.0 / test_charge;
  }
  f.coupling_ = std::abs(test_charge * spec.strength) / (4.0 * std::numbers::pi);
  f.source_origin_ = spec.position;
  f.softening_ = spec.softening;
  return f;
}

bool PotentialField::is_static() const {
  return source_velocity_ == Vec3{} && external_.ramp == Vec3{};
}

bool PotentialField::is_singular_at(const Vec3& r, double t) const {
  if (kind_ == SourceKind::Uniform || softening_ > 0.0) return false;
  return norm(displacement(r, t)) < kSingularRadius;
}

// W = -k (d^2 + eps^2)^{-1/2}
double PotentialField::wbar(const Vec3& r, double t) const {
  if (kind_ == SourceKind::Uniform) return uniform_value_;
  const Vec3 d = displacement(r, t);
  return -coupling_ / std::sqrt(norm2(d) + softening_ * softening_);
}

Vec3 PotentialField::grad_wbar(const Vec3& r, double t) const {
  if (kind_ == SourceKind::Uniform) return {};
  const Vec3 d = displacement(r, t);
  const double s = norm2(d) + softening_ * softening_;
  return d * (coupling_ / (s * std::sqrt(s)));
}

double PotentialField::dwbar_dt(const Vec3& r, double t) const {
  return -dot(grad_wbar(r, t), source_velocity_);
}

Mat3 PotentialField::hess_wbar(const Vec3& r, double t) const {
  if (kind_ == SourceKind::Uniform) return {};
  const Vec3 d = displacement(r, t);
  const double s = norm2(d) + softening_ * softening_;
  const double s32 = s * std::sqrt(s);
  return Mat3::identity() * (coupling_ / s32) - Mat3::outer(d, d) * (3.0 * coupling_ / (s32 * s));
}

double PotentialField::d2wbar_dt2(const Vec3& r, double t) const {
  const Vec3& uf = source_velocity_;
  return dot(uf, hess_wbar(r, t) * uf);
}

Vec3 PotentialField::vecpot(const Vec3& r, double t) const {
  Vec3 a = external_.offset + external_.ramp * t + external_.gradient * r;
  if (induced_scale_ != 0.0) a += source_velocity_ * (wbar(r, t) * induced_scale_);
  return a;
}

Mat3 PotentialField::grad_vecpot(const Vec3& r, double t) const {
  Mat3 j = external_.gradient;
  if (induced_scale_ != 0.0) j = j + Mat3::outer(source_velocity_, grad_wbar(r, t)) * induced_scale_;
  return j;
}

Vec3 PotentialField::dvecpot_dt(const Vec3& r, double t) const {
  Vec3 a = external_.ramp;
  if (induced_scale_ != 0.0) a += source_velocity_ * (dwbar_dt(r, t) * induced_scale_);
  return a;
}

Vec3 electric_field(const PotentialField& f, double q, const Vec3& r, double t) {
  if (q == 0.0) throw PhysicsError(ErrorCode::ZeroCharge, "electric field needs q != 0");
  return -f.grad_wbar(r, t) / q - f.dvecpot_dt(r, t);
}

Vec3 magnetic_field(const PotentialField& f, const Vec3& r, double t) {
  const Mat3 j = f.grad_vecpot(r, t);
  return {j(2, 1) - j(1, 2), j(0, 2) - j(2, 0), j(1, 0) - j(0, 1)};
}

FieldSample sample_fields(const PotentialField& f, double q, const Vec3& r, double t) {
  return {electric_field(f, q, r, t), magnetic_field(f, r, t)};
}

ScalarField scalar_field(const PotentialField& f) {
  ScalarField s;
  s.value = [f](const Vec3& r, double t) { return f.wbar(r, t); };
  s.hessian = [f](const Vec3& r, double t) { return f.hess_wbar(r, t); };
  s.d2dt2 = [f](const Vec3& r, double t) { return f.d2wbar_dt2(r, t); };
  s.singular = [f](const Vec3& r, double t) { return f.is_singular_at(r, t); };
  return s;
}

ScalarFn source_density(const PotentialField& f) {
  return [f](const Vec3& r, double t) {
    return f.d2wbar_dt2(r, t) - f.hess_wbar(r, t).trace();
  };
}

namespace {

// Fourth-order central second derivative along a line.
template <class F>
double second_derivative(F&& g, double h) {
  return (-g(2 * h) + 16 * g(h) - 30 * g(0.0) + 16 * g(-h) - g(-2 * h)) / (12 * h * h);
}

}  // namespace

double wave_residual(const ScalarField& w, const ScalarFn& rho, const Vec3& r, double t) {
  if (!w.value) throw PhysicsError(ErrorCode::InvalidInput, "scalar field has no value function");
  if (w.singular && w.singular(r, t)) {
    throw PhysicsError(ErrorCode::SingularPoint, "evaluation point on a point source");
  }
  constexpr double h = 1e-3;
  double laplacian = 0.0;
  if (w.hessian) {
    laplacian = w.hessian(r, t).trace();
  } else {
    for (int k = 0; k < 3; ++k) {
      laplacian += second_derivative(
          [&](double dx) {
            Vec3 q = r;
            q[k] += dx;
            return w.value(q, t);
          },
          h);
    }
  }
  const double d2t = w.d2dt2 ? w.d2dt2(r, t)
                             : second_derivative([&](double dt) { return w.value(r, t + dt); }, h);
  const double density = rho ? rho(r, t) : 0.0;
  return d2t - laplacian - density;
}

}  // namespace vfl
