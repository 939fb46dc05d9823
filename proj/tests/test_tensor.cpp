#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "aniso/tensor.hpp"

using namespace aniso;

TEST(Vec2, BasicAlgebra) {
  const Vec2 a{1.0, 2.0};
  const Vec2 b{3.0, -1.0};
  EXPECT_DOUBLE_EQ(dot(a, b), 1.0);
  EXPECT_DOUBLE_EQ(cross(a, b), -7.0);
  EXPECT_DOUBLE_EQ(norm(Vec2{3.0, 4.0}), 5.0);
  EXPECT_DOUBLE_EQ(signed_area2({0, 0}, {1, 0}, {0, 1}), 1.0);
  EXPECT_DOUBLE_EQ(signed_area2({0, 0}, {0, 1}, {1, 0}), -1.0);
}

TEST(SymTensor2, EigenOfDiagonal) {
  const SymEigen e = SymTensor2{2.0, 0.0, -3.0}.eigen();
  EXPECT_DOUBLE_EQ(e.large, 2.0);
  EXPECT_DOUBLE_EQ(e.small, -3.0);
}

TEST(SymTensor2, EigenReconstructsRandomTensors) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int k = 0; k < 200; ++k) {
    const SymTensor2 t{u(rng), u(rng), u(rng)};
    const SymEigen e = t.eigen();
    const SymTensor2 back = SymTensor2::from_eigen(e.large, e.small, e.angle);
    EXPECT_NEAR(back.xx, t.xx, 1e-12);
    EXPECT_NEAR(back.xy, t.xy, 1e-12);
    EXPECT_NEAR(back.yy, t.yy, 1e-12);
    EXPECT_NEAR(e.large * e.small, t.det(), 1e-11);
    EXPECT_NEAR(e.large + e.small, t.trace(), 1e-12);
    const Vec2 v = e.large_dir();
    const Vec2 tv = t.apply(v);
    EXPECT_NEAR(tv.x, e.large * v.x, 1e-11);
    EXPECT_NEAR(tv.y, e.large * v.y, 1e-11);
  }
}

TEST(SymTensor2, OuterIsSymmetrized) {
  const SymTensor2 o = SymTensor2::outer({1.0, 0.0}, {0.0, 1.0});
  EXPECT_DOUBLE_EQ(o.xx, 0.0);
  EXPECT_DOUBLE_EQ(o.xy, 0.5);
  EXPECT_DOUBLE_EQ(o.yy, 0.0);
}

TEST(SymTensor2, InverseAndQuadraticForm) {
  const SymTensor2 t{4.0, 1.0, 3.0};
  const SymTensor2 i = t.inverse();
  EXPECT_NEAR(t.xx * i.xx + t.xy * i.xy, 1.0, 1e-15);
  EXPECT_NEAR(t.xx * i.xy + t.xy * i.yy, 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(t.quad({1.0, 2.0}), 4.0 + 4.0 + 12.0);
}

TEST(SymTensor2, RotationMatchesMatrixProduct) {
  const SymTensor2 t{3.0, 0.0, 1.0};
  const SymTensor2 r = rotated(t, std::numbers::pi / 2.0);
  EXPECT_NEAR(r.xx, 1.0, 1e-15);
  EXPECT_NEAR(r.xy, 0.0, 1e-15);
  EXPECT_NEAR(r.yy, 3.0, 1e-15);
}

TEST(SymTensor2, SpdDetection) {
  EXPECT_TRUE(is_spd(SymTensor2{2.0, 1.0, 2.0}));
  EXPECT_FALSE(is_spd(SymTensor2{1.0, 2.0, 1.0}));
  EXPECT_FALSE(is_spd(SymTensor2{0.0, 0.0, 1.0}));
}

TEST(MetricIntersection, IsSpdAndDominatesBoth) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> lam(0.1, 100.0);
  std::uniform_real_distribution<double> ang(0.0, std::numbers::pi);
  for (int k = 0; k < 200; ++k) {
    const SymTensor2 a = SymTensor2::from_eigen(lam(rng), lam(rng), ang(rng));
    const SymTensor2 b = SymTensor2::from_eigen(lam(rng), lam(rng), ang(rng));
    const SymTensor2 c = intersect(a, b);
    ASSERT_TRUE(is_spd(c));
    // c - a and c - b are positive semidefinite up to rounding.
    for (const SymTensor2& d : {c - a, c - b}) {
      const SymEigen e = d.eigen();
      EXPECT_GE(e.small, -1e-9 * max_abs_entry(c));
    }
  }
}

TEST(MetricIntersection, NestedMetricsReturnTheLarger) {
  const SymTensor2 a{4.0, 0.0, 4.0};
  const SymTensor2 b{1.0, 0.0, 1.0};
  const SymTensor2 c = intersect(a, b);
  EXPECT_NEAR(c.xx, 4.0, 1e-12);
  EXPECT_NEAR(c.xy, 0.0, 1e-12);
  EXPECT_NEAR(c.yy, 4.0, 1e-12);
}
