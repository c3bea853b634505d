#include <gtest/gtest.h>

#include <random>

#include "vfl/errors.hpp"
#include "vfl/geometry.hpp"

using namespace vfl;

namespace {

Vec3 random_vec(std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> d(-scale, scale);
  return {d(rng), d(rng), d(rng)};
}

void expect_code(ErrorCode code, auto&& f) {
  try {
    f();
    ADD_FAILURE() << "expected " << to_string(code);
  } catch (const PhysicsError& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(MinkowskiInner, RestEvent) { EXPECT_DOUBLE_EQ(minkowski_inner({{}, 2.0}, {{}, 2.0}), 4.0); }

TEST(MinkowskiInner, NullVector) {
  const MinkowskiEvent x{{1.0, 0.0, 0.0}, 1.0};
  EXPECT_DOUBLE_EQ(minkowski_inner(x, x), 0.0);
}

TEST(MinkowskiInner, DirectArithmetic) {
  const MinkowskiEvent x{{1.0, 2.0, 2.0}, 4.0};
  EXPECT_DOUBLE_EQ(minkowski_inner(x, x), 7.0);
}

TEST(MinkowskiInner, BilinearAndSymmetric) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int k = 0; k < 500; ++k) {
    const MinkowskiEvent x{random_vec(rng, 3.0), d(rng)}, y{random_vec(rng, 3.0), d(rng)},
        z{random_vec(rng, 3.0), d(rng)};
    const double a = d(rng), b = d(rng);
    const MinkowskiEvent ax_by{x.r * a + y.r * b, x.t * a + y.t * b};
    EXPECT_NEAR(minkowski_inner(x, y), minkowski_inner(y, x), 1e-12);
    EXPECT_NEAR(minkowski_inner(ax_by, z), a * minkowski_inner(x, z) + b * minkowski_inner(y, z),
                1e-10);
  }
}

TEST(ProperTimeFactor, Values) {
  EXPECT_DOUBLE_EQ(proper_time_factor({}), 1.0);
  EXPECT_NEAR(proper_time_factor({0.6, 0.0, 0.0}), 0.8, 1e-15);
  expect_code(ErrorCode::SuperluminalVelocity, [] { proper_time_factor({1.0, 0.0, 0.0}); });
  expect_code(ErrorCode::SuperluminalVelocity, [] { proper_time_factor({0.8, 0.8, 0.0}); });
}

TEST(LabTimeFactor, Values) {
  EXPECT_DOUBLE_EQ(lab_time_factor({}), 1.0);
  EXPECT_DOUBLE_EQ(lab_time_factor({0.75, 0.0, 0.0}), 1.25);
  const Vec3 rdot{2.0, 1.0, 2.0};
  EXPECT_NEAR(lab_time_factor(rdot) * proper_time_factor(lab_velocity(rdot)), 1.0, 1e-12);
}

TEST(LabTimeFactor, ReciprocityRandom) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 rdot = random_vec(rng, 10.0);
    const Vec3 u = lab_velocity(rdot);
    EXPECT_LT(norm(u), 1.0);
    EXPECT_NEAR(lab_time_factor(rdot) * proper_time_factor(u), 1.0, 1e-12);
  }
}

TEST(OrthogonalProjector, AxisAligned) {
  const Mat3 m = orthogonal_projector({1.0, 0.0, 0.0}).matrix();
  Mat3 expect;
  expect(1, 1) = 1.0;
  expect(2, 2) = 1.0;
  EXPECT_LT(max_abs_difference(m, expect), 1e-15);
}

TEST(OrthogonalProjector, KernelAndFixedVectors) {
  const Vec3 k = orthogonal_projector({1.0, 1.0, 0.0}).apply({1.0, 1.0, 0.0});
  EXPECT_LT(norm(k), 1e-15);
  const Vec3 w = orthogonal_projector({3.0, 4.0, 0.0}).apply({0.0, 0.0, 5.0});
  EXPECT_LT(norm(w - Vec3{0.0, 0.0, 5.0}), 1e-15);
}

TEST(OrthogonalProjector, ZeroDirectionThrows) {
  expect_code(ErrorCode::ZeroDirection, [] { orthogonal_projector({}); });
}

TEST(OrthogonalProjector, SymmetricIdempotentTraceTwo) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 500; ++k) {
    Vec3 v = random_vec(rng, 5.0);
    if (norm(v) < 1e-6) continue;
    const Mat3 m = orthogonal_projector(v).matrix();
    EXPECT_LT(max_abs_difference(m, m.transposed()), 1e-12);
    EXPECT_LT(max_abs_difference(m * m, m), 1e-12);
    EXPECT_NEAR(m.trace(), 2.0, 1e-12);
    EXPECT_LT(norm(m * v), 1e-12 * norm(v));
  }
}

TEST(EuclideanEvent, RelativeEventAndNorm) {
  const EuclideanEvent e = relative_event(2.0, {4.0, 1.0, 0.0}, {1.0, 1.0, 0.0});
  EXPECT_DOUBLE_EQ(e.tau, 2.0);
  EXPECT_EQ(e.r, (Vec3{3.0, 0.0, 0.0}));
  EXPECT_DOUBLE_EQ(euclidean_norm(e), std::sqrt(13.0));
}

TEST(Vec3, CrossAndFinite) {
  EXPECT_EQ(cross({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}), (Vec3{0.0, 0.0, 1.0}));
  EXPECT_TRUE(is_finite({1.0, 2.0, 3.0}));
  EXPECT_FALSE(is_finite({1.0, std::nan(""), 3.0}));
}
