#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "adnms/geometry.hpp"
#include "oracles.hpp"

namespace adnms {
namespace {

BoundingBox make(const std::array<double, 4>& b) { return BoundingBox(b[0], b[1], b[2], b[3]); }

TEST(BoundingBoxTest, Area) {
  EXPECT_DOUBLE_EQ(area(BoundingBox(0, 0, 2, 2)), 4.0);
  EXPECT_DOUBLE_EQ(area(BoundingBox(0, 0, 1, 3)), 3.0);
  EXPECT_DOUBLE_EQ(area(BoundingBox(1.5, 2.5, 4.0, 3.5)), 2.5);
}

TEST(BoundingBoxTest, RejectsDegenerateAndNonFinite) {
  EXPECT_THROW(BoundingBox(0, 0, 0, 1), InvalidBox);
  EXPECT_THROW(BoundingBox(0, 0, 1, 0), InvalidBox);
  EXPECT_THROW(BoundingBox(2, 0, 1, 1), InvalidBox);
  EXPECT_THROW(BoundingBox(0, 0, std::numeric_limits<double>::infinity(), 1), InvalidBox);
  EXPECT_THROW(BoundingBox(std::nan(""), 0, 1, 1), InvalidBox);
}

TEST(IouTest, HandCases) {
  EXPECT_EQ(iou(BoundingBox(0, 0, 2, 2), BoundingBox(0, 0, 2, 2)), 1.0);
  EXPECT_EQ(iou(BoundingBox(0, 0, 1, 1), BoundingBox(5, 5, 6, 6)), 0.0);
  // intersection 2, union 6
  EXPECT_DOUBLE_EQ(iou(BoundingBox(0, 0, 2, 2), BoundingBox(1, 0, 3, 2)), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(oracle::pixel_iou({0, 0, 2, 2}, {1, 0, 3, 2}), 1.0 / 3.0);
  // Touching edges do not overlap.
  EXPECT_EQ(iou(BoundingBox(0, 0, 1, 1), BoundingBox(1, 0, 2, 1)), 0.0);
}

TEST(IoaTest, HandCases) {
  EXPECT_EQ(ioa(BoundingBox(1, 1, 2, 2), BoundingBox(0, 0, 4, 4)), 1.0);
  EXPECT_EQ(ioa(BoundingBox(0, 0, 1, 1), BoundingBox(3, 3, 4, 4)), 0.0);
  EXPECT_DOUBLE_EQ(ioa(BoundingBox(0, 0, 2, 2), BoundingBox(1, 0, 3, 2)), 0.5);
  // Not symmetric.
  EXPECT_DOUBLE_EQ(ioa(BoundingBox(0, 0, 4, 4), BoundingBox(1, 1, 2, 2)), 1.0 / 16.0);
}

TEST(IouProperty, AgreesWithPixelCountingOnIntegerBoxes) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto a = oracle::random_box(rng, 40, true);
    const auto b = oracle::random_box(rng, 40, true);
    const double expected = oracle::pixel_iou({int(a[0]), int(a[1]), int(a[2]), int(a[3])},
                                              {int(b[0]), int(b[1]), int(b[2]), int(b[3])});
    const double got = iou(make(a), make(b));
    if (expected == 0.0) {
      EXPECT_EQ(got, 0.0);
    } else {
      EXPECT_LE(std::abs(got - expected) / expected, 1e-12) << "trial " << trial;
    }
  }
}

TEST(IouProperty, SymmetryIdentityAndBounds) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto a = make(oracle::random_box(rng, 100, false));
    const auto b = make(oracle::random_box(rng, 100, false));
    const double ab = iou(a, b);
    EXPECT_EQ(ab, iou(b, a));
    EXPECT_EQ(iou(a, a), 1.0);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, std::min(ioa(a, b), ioa(b, a)) * (1 + 1e-12));
    EXPECT_LE(std::max(ioa(a, b), ioa(b, a)), 1.0);
  }
}

}  // namespace
}  // namespace adnms
