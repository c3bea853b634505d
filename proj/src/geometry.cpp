#include "vfl/geometry.hpp"

#include "vfl/errors.hpp"

namespace vfl {

bool is_finite(const Vec3& a) {
  return std::isfinite(a.x) && std::isfinite(a.y) && std::isfinite(a.z);
}

Mat3 Mat3::identity() {
  Mat3 r;
  for (int i = 0; i < 3; ++i) r.m[i][i] = 1.0;
  return r;
}

Mat3 Mat3::outer(const Vec3& a, const Vec3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = a[i] * b[j];
  return r;
}

Mat3 Mat3::transposed() const {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
  return r;
}

Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
  return r;
}

Mat3 operator-(const Mat3& a, const Mat3& b) { return a + b * -1.0; }

Mat3 operator*(const Mat3& a, double s) {
  Mat3 r = a;
  for (auto& row : r.m)
    for (auto& v : row) v *= s;
  return r;
}

Mat3 operator*(const Mat3& a, const Mat3& b) {
  Mat3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r.m[i][j] += a.m[i][k] * b.m[k][j];
  return r;
}

Vec3 operator*(const Mat3& a, const Vec3& v) {
  return {a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z,
          a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z,
          a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z};
}

double max_abs_difference(const Mat3& a, const Mat3& b) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) d = std::max(d, std::abs(a.m[i][j] - b.m[i][j]));
  return d;
}

double euclidean_inner(const EuclideanEvent& a, const EuclideanEvent& b) {
  return dot(a.r, b.r) + a.tau * b.tau;
}

EuclideanEvent relative_event(double tau, const Vec3& r, const Vec3& r_source) {
  return {r - r_source, tau};
}

double minkowski_inner(const MinkowskiEvent& x, const MinkowskiEvent& y) {
  return x.t * y.t - dot(x.r, y.r);
}

double proper_time_factor(const Vec3& u) {
  const double u2 = norm2(u);
  if (!(u2 < 1.0)) {
    throw PhysicsError(ErrorCode::SuperluminalVelocity,
                       "|u|^2 = " + std::to_string(u2) + " is not below 1");
  }
  return std::sqrt(1.0 - u2);
}

double lab_time_factor(const Vec3& rdot) { return std::sqrt(1.0 + norm2(rdot)); }

Vec3 lab_velocity(const Vec3& rdot) { return rdot / lab_time_factor(rdot); }

Projector3 orthogonal_projector(const Vec3& v) {
  const double v2 = norm2(v);
  if (!(v2 > 0.0)) {
    throw PhysicsError(ErrorCode::ZeroDirection, "projector direction has zero length");
  }
  return Projector3(Mat3::identity() - Mat3::outer(v, v) * (1.0 / v2));
}

}  // namespace vfl
