#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "adnms/error.hpp"
#include "adnms/suppression.hpp"
#include "oracles.hpp"

namespace adnms {
namespace {

Detection det(double x1, double y1, double x2, double y2, double score, std::size_t idx,
              std::optional<double> density = std::nullopt) {
  return {BoundingBox(x1, y1, x2, y2), score, density, idx};
}

SuppressionConfig config(Method m, bool adaptive, double nt = 0.5) {
  SuppressionConfig cfg;
  cfg.method = m;
  cfg.adaptive = adaptive;
  cfg.nt = nt;
  return cfg;
}

// Random instance of up to `max_n` boxes in a small canvas so overlaps are common.
std::vector<Detection> random_dets(std::mt19937_64& rng, std::size_t max_n, bool with_density) {
  std::uniform_int_distribution<std::size_t> count(1, max_n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = count(rng);
  std::vector<Detection> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto b = oracle::random_box(rng, 30, false);
    std::optional<double> d;
    if (with_density) d = unit(rng);
    // Coarse scores make ties likely.
    out.push_back({BoundingBox(b[0], b[1], b[2], b[3]), std::round(unit(rng) * 20) / 20, d, i});
  }
  return out;
}

TEST(AdaptiveThresholdTest, Cases) {
  EXPECT_EQ(adaptive_threshold(0.5, 0.7), 0.7);
  EXPECT_EQ(adaptive_threshold(0.5, 0.3), 0.5);
  EXPECT_EQ(adaptive_threshold(0.5, 0.5), 0.5);
}

TEST(RescoreWeightTest, Cases) {
  EXPECT_EQ(rescore_weight(Method::Greedy, 0.9, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(rescore_weight(Method::SoftLinear, 0.6, 0.5), 0.4);
  EXPECT_EQ(rescore_weight(Method::SoftGaussian, 0.0, 0.5), 1.0);
  // exp(-0.5) to 20 digits
  EXPECT_NEAR(rescore_weight(Method::SoftGaussian, 0.5, 0.5), 0.60653065971263342360, 1e-15);
}

TEST(SuppressionRangeTest, InclusiveBaseStrictDensity) {
  EXPECT_TRUE(in_suppression_range(0.5, 0.5, false, 0.0));
  EXPECT_FALSE(in_suppression_range(0.49, 0.5, false, 0.0));
  // density at or below nt behaves like the plain threshold
  EXPECT_TRUE(in_suppression_range(0.5, 0.5, true, 0.5));
  EXPECT_TRUE(in_suppression_range(0.5, 0.5, true, 0.2));
  // crowded: neighbours up to and including the density survive
  EXPECT_FALSE(in_suppression_range(0.6, 0.5, true, 0.6));
  EXPECT_TRUE(in_suppression_range(0.61, 0.5, true, 0.6));
}

TEST(SuppressTest, PerfectDuplicateRemoved) {
  const std::vector<Detection> dets = {det(0, 0, 10, 20, 0.9, 0), det(0, 0, 10, 20, 0.8, 1)};
  const auto r = suppress(dets, config(Method::Greedy, false));
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].score, 0.9);
  EXPECT_EQ(r.suppressed_count, 1u);
}

TEST(SuppressTest, CrowdPairGreedyVsAdaptive) {
  // Two people with mutual IoU 0.6, both correctly detected.
  const std::vector<Detection> dets = {det(0, 0, 20, 20, 0.90, 0, 0.6),
                                       det(5, 0, 25, 20, 0.85, 1, 0.6)};
  EXPECT_EQ(suppress(dets, config(Method::Greedy, false)).kept.size(), 1u);
  const auto adaptive = suppress(dets, config(Method::Greedy, true));
  ASSERT_EQ(adaptive.kept.size(), 2u);
  EXPECT_EQ(adaptive.kept[0].source_index, 0u);
  EXPECT_EQ(adaptive.kept[1].source_index, 1u);
  EXPECT_EQ(adaptive.suppressed_count, 0u);
}

TEST(SuppressTest, NothingAboveThresholdReturnsSortedInput) {
  const std::vector<Detection> dets = {det(0, 0, 10, 10, 0.3, 0), det(20, 0, 30, 10, 0.9, 1),
                                       det(40, 0, 50, 10, 0.6, 2)};
  for (Method m : {Method::Greedy, Method::SoftLinear, Method::SoftGaussian}) {
    const auto r = suppress(dets, config(m, false));
    ASSERT_EQ(r.kept.size(), 3u);
    EXPECT_EQ(r.kept[0], dets[1]);
    EXPECT_EQ(r.kept[1], dets[2]);
    EXPECT_EQ(r.kept[2], dets[0]);
    EXPECT_EQ(r.suppressed_count, 0u);
  }
}

TEST(SuppressTest, EqualScoresBreakBySourceIndex) {
  const std::vector<Detection> dets = {det(0, 0, 10, 10, 0.7, 5), det(0, 0, 10, 10, 0.7, 2)};
  const auto r = suppress(dets, config(Method::Greedy, false));
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].source_index, 2u);
}

TEST(SuppressTest, SoftLinearDecaysNeighbour) {
  const std::vector<Detection> dets = {det(0, 0, 20, 20, 0.9, 0), det(5, 0, 25, 20, 0.8, 1)};
  const auto r = suppress(dets, config(Method::SoftLinear, false));
  ASSERT_EQ(r.kept.size(), 2u);
  EXPECT_NEAR(r.kept[1].score, 0.8 * 0.4, 1e-15);
}

TEST(SuppressTest, SoftScoreFloorPrunes) {
  auto cfg = config(Method::SoftLinear, false);
  cfg.score_floor = 0.5;
  const std::vector<Detection> dets = {det(0, 0, 20, 20, 0.9, 0), det(5, 0, 25, 20, 0.8, 1)};
  EXPECT_EQ(suppress(dets, cfg).kept.size(), 1u);
}

TEST(SuppressTest, LowInputScoresAreNotPrunedUnlessDecayed) {
  const std::vector<Detection> dets = {det(0, 0, 10, 10, 0.0005, 0)};
  EXPECT_EQ(suppress(dets, config(Method::SoftLinear, false)).kept.size(), 1u);
}

TEST(SuppressTest, Errors) {
  const std::vector<Detection> no_density = {det(0, 0, 10, 10, 0.9, 0)};
  EXPECT_THROW(suppress(no_density, config(Method::Greedy, true)), ConfigError);
  const std::vector<Detection> nan_score = {det(0, 0, 10, 10, std::nan(""), 0)};
  EXPECT_THROW(suppress(nan_score, config(Method::Greedy, false)), InputError);
  const std::vector<Detection> big_score = {det(0, 0, 10, 10, 1.5, 0)};
  EXPECT_THROW(suppress(big_score, config(Method::Greedy, false)), InputError);
  EXPECT_THROW(suppress(no_density, config(Method::Greedy, false, 1.0)), ConfigError);
  EXPECT_TRUE(suppress({}, config(Method::SoftLinear, false)).kept.empty());
}

TEST(SuppressProperty, GreedyMatchesBruteForce) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto dets = random_dets(rng, 10, false);
    std::vector<oracle::ScoredBox> boxes;
    for (const auto& d : dets) boxes.push_back({{d.box.x1(), d.box.y1(), d.box.x2(), d.box.y2()}, d.score});
    const double nt = 0.3 + 0.1 * (trial % 5);
    const auto expected = oracle::greedy_nms(boxes, nt);
    const auto r = suppress(dets, config(Method::Greedy, false, nt));
    ASSERT_EQ(r.kept.size(), expected.size()) << "trial " << trial;
    for (std::size_t k = 0; k < expected.size(); ++k) {
      EXPECT_EQ(r.kept[k].source_index, expected[k]);
    }
  }
}

TEST(SuppressProperty, ScoresNeverIncreaseAndOutputIsSorted) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto dets = random_dets(rng, 12, true);
    for (Method m : {Method::Greedy, Method::SoftLinear, Method::SoftGaussian}) {
      for (bool adaptive : {false, true}) {
        const auto r = suppress(dets, config(m, adaptive));
        EXPECT_LE(r.kept.size(), dets.size());
        EXPECT_EQ(r.kept.size() + r.suppressed_count, dets.size());
        for (std::size_t k = 0; k < r.kept.size(); ++k) {
          const Detection& in = dets[r.kept[k].source_index];
          EXPECT_EQ(r.kept[k].box, in.box);
          EXPECT_LE(r.kept[k].score, in.score);
          if (m == Method::Greedy) EXPECT_EQ(r.kept[k].score, in.score);
          if (k > 0) EXPECT_GE(r.kept[k - 1].score, r.kept[k].score);
        }
      }
    }
  }
}

TEST(SuppressProperty, AdaptiveEqualsPlainWhenSparse) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const double nt = 0.3 + 0.1 * (trial % 5);
    auto dets = random_dets(rng, 10, true);
    for (auto& d : dets) d.density = nt * unit(rng);
    dets.front().density = nt;  // boundary case
    for (Method m : {Method::Greedy, Method::SoftLinear, Method::SoftGaussian}) {
      const auto plain = suppress(dets, config(m, false, nt));
      const auto adaptive = suppress(dets, config(m, true, nt));
      EXPECT_EQ(plain.kept, adaptive.kept);
    }
  }
}

TEST(SuppressProperty, GreedyIsIdempotent) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const auto dets = random_dets(rng, 12, false);
    const auto once = suppress(dets, config(Method::Greedy, false));
    const auto twice = suppress(once.kept, config(Method::Greedy, false));
    EXPECT_EQ(twice.kept, once.kept);
  }
}

TEST(SuppressProperty, MoreThresholdNeverFewerKeptUpToThreeBoxes) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto dets = random_dets(rng, 3, false);
    std::size_t prev = 0;
    for (double nt : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const std::size_t kept = suppress(dets, config(Method::Greedy, false, nt)).kept.size();
      EXPECT_GE(kept, prev);
      prev = kept;
    }
  }
}

TEST(SuppressProperty, ThresholdMonotonicityFailsFromFourBoxes) {
  // B overlaps A at 0.55 and overlaps C and D at 0.65; A, C and D are
  // mutually below 0.5. At nt 0.5 A removes B and C, D survive; at nt 0.6 B
  // survives and removes both.
  const double s = 10.0 * 0.35 / 1.65;
  const double t = 10.0 * 0.45 / 1.55;
  const std::vector<Detection> dets = {det(0, -t, 10, 10 - t, 0.9, 0), det(0, 0, 10, 10, 0.8, 1),
                                       det(-s, 0, 10 - s, 10, 0.7, 2), det(s, 0, 10 + s, 10, 0.6, 3)};
  EXPECT_EQ(suppress(dets, config(Method::Greedy, false, 0.5)).kept.size(), 3u);
  EXPECT_EQ(suppress(dets, config(Method::Greedy, false, 0.6)).kept.size(), 2u);
}

TEST(SuppressProperty, AdaptiveKeepsCrowdedPairs) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double nt = 0.3 + 0.4 * unit(rng);
    const double w = 10.0 + 40.0 * unit(rng);
    // Shift giving IoU strictly between nt and 0.95.
    const double v = nt + (0.95 - nt) * (0.05 + 0.9 * unit(rng));
    const double dx = w * (1.0 - v) / (1.0 + v);
    const BoundingBox a(0, 0, w, 2 * w);
    const BoundingBox b(dx, 0, dx + w, 2 * w);
    const double pair_iou = iou(a, b);
    ASSERT_GT(pair_iou, nt);
    const double density = pair_iou + (1.0 - pair_iou) * unit(rng);
    const std::vector<Detection> dets = {{a, 0.9, density, 0}, {b, 0.8, density, 1}};
    EXPECT_EQ(suppress(dets, config(Method::Greedy, false, nt)).kept.size(), 1u);
    EXPECT_EQ(suppress(dets, config(Method::Greedy, true, nt)).kept.size(), 2u);
  }
}

}  // namespace
}  // namespace adnms
