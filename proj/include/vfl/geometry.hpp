#pragma once

#include <array>
#include <cmath>

namespace vfl {

// Light-speed units (c = 1) throughout the library.
namespace tolerance {
inline constexpr double algebraic = 1e-12;
inline constexpr double projector_spectrum = 1e-9;
}  // namespace tolerance

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  constexpr double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  constexpr Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  constexpr Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  constexpr Vec3& operator*=(double s) { x *= s; y *= s; z *= s; return *this; }
  constexpr Vec3& operator/=(double s) { x /= s; y /= s; z /= s; return *this; }

  friend constexpr bool operator==(const Vec3&, const Vec3&) = default;
};

constexpr Vec3 operator+(Vec3 a, const Vec3& b) { return a += b; }
constexpr Vec3 operator-(Vec3 a, const Vec3& b) { return a -= b; }
constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return a *= s; }
constexpr Vec3 operator*(double s, Vec3 a) { return a *= s; }
constexpr Vec3 operator/(Vec3 a, double s) { return a /= s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
constexpr double norm2(const Vec3& a) { return dot(a, a); }
inline double norm(const Vec3& a) { return std::sqrt(norm2(a)); }
bool is_finite(const Vec3& a);

// Row-major 3x3 matrix. For Jacobians m[i][j] = d f_i / d x_j.
struct Mat3 {
  std::array<std::array<double, 3>, 3> m{};

  static Mat3 identity();
  static Mat3 outer(const Vec3& a, const Vec3& b);

  double operator()(int i, int j) const { return m[i][j]; }
  double& operator()(int i, int j) { return m[i][j]; }

  Mat3 transposed() const;
  double trace() const { return m[0][0] + m[1][1] + m[2][2]; }
};

Mat3 operator+(const Mat3& a, const Mat3& b);
Mat3 operator-(const Mat3& a, const Mat3& b);
Mat3 operator*(const Mat3& a, double s);
Mat3 operator*(const Mat3& a, const Mat3& b);
Vec3 operator*(const Mat3& a, const Vec3& v);
double max_abs_difference(const Mat3& a, const Mat3& b);

// x = (r, t) in the laboratory frame.
struct MinkowskiEvent {
  Vec3 r;
  double t = 0.0;
};

// xi = (r, tau) in the proper rest frame; also holds the relative event
// eta_f = (tau, r - r_f) built by relative_event().
struct EuclideanEvent {
  Vec3 r;
  double tau = 0.0;

  EuclideanEvent& operator+=(const EuclideanEvent& o) { r += o.r; tau += o.tau; return *this; }
  EuclideanEvent& operator-=(const EuclideanEvent& o) { r -= o.r; tau -= o.tau; return *this; }
  EuclideanEvent& operator*=(double s) { r *= s; tau *= s; return *this; }
};

inline EuclideanEvent operator+(EuclideanEvent a, const EuclideanEvent& b) { return a += b; }
inline EuclideanEvent operator-(EuclideanEvent a, const EuclideanEvent& b) { return a -= b; }
inline EuclideanEvent operator*(EuclideanEvent a, double s) { return a *= s; }
inline EuclideanEvent operator*(double s, EuclideanEvent a) { return a *= s; }

double euclidean_inner(const EuclideanEvent& a, const EuclideanEvent& b);
inline double euclidean_norm(const EuclideanEvent& a) { return std::sqrt(euclidean_inner(a, a)); }

EuclideanEvent relative_event(double tau, const Vec3& r, const Vec3& r_source);

// <x, y> = t_x t_y - <r_x, r_y>.
double minkowski_inner(const MinkowskiEvent& x, const MinkowskiEvent& y);

// dtau/dt = (1 - u^2)^{1/2}; throws SuperluminalVelocity for |u| >= 1.
double proper_time_factor(const Vec3& u);

// dt/dtau = (1 + rdot^2)^{1/2} with rdot = dr/dtau.
double lab_time_factor(const Vec3& rdot);

// Lab velocity u = dr/dt from the proper-time velocity rdot = dr/dtau.
Vec3 lab_velocity(const Vec3& rdot);

// Symmetric idempotent rank-2 projector onto the plane orthogonal to a
// direction. Serves N (string tangent), T (string velocity) and T_f
// (relative velocity).
class Projector3 {
 public:
  const Mat3& matrix() const { return m_; }
  Vec3 apply(const Vec3& w) const { return m_ * w; }

 private:
  friend Projector3 orthogonal_projector(const Vec3& v);
  explicit Projector3(const Mat3& m) : m_(m) {}
  Mat3 m_;
};

// Throws ZeroDirection when |v| = 0.
Projector3 orthogonal_projector(const Vec3& v);

}  // namespace vfl
