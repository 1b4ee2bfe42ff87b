#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "kts/oracle.hpp"
#include "kts/solver.hpp"
#include "kts/synth.hpp"
#include "test_oracles.hpp"

namespace kts {
namespace {

VarianceTable dot_table(const FeatureSequence& x) {
  return build_variance_table(compute_gram(x, KernelSpec::dot()));
}

TEST(BruteForceTest, Examples) {
  auto s = brute_force(dot_table(testing::two_blocks()), 2);
  EXPECT_EQ(s.change_points, (std::vector<std::size_t>{2}));
  EXPECT_EQ(s.objective, 0.0);

  s = brute_force(dot_table(testing::one_dim({0, 1, 5, 6, 10, 11})), 2);
  EXPECT_EQ(s.change_points, (std::vector<std::size_t>{2}));
  EXPECT_DOUBLE_EQ(s.objective, 26.5);

  s = brute_force(dot_table(testing::gaussian_features(6, 2, 1)), 6);
  EXPECT_EQ(s.change_points, (std::vector<std::size_t>{1, 2, 3, 4, 5}));
  EXPECT_EQ(s.objective, 0.0);
}

TEST(BruteForceTest, LexicographicTieBreak) {
  // Every placement costs 0 on constant features; the first one wins.
  const auto x = FeatureSequence(7, 1, std::vector<double>(7, 2.0));
  EXPECT_EQ(brute_force(dot_table(x), 3).change_points, (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(brute_force(dot_table(x), 3, 2).change_points, (std::vector<std::size_t>{2, 4}));
}

TEST(BruteForceTest, Errors) {
  try {
    brute_force(dot_table(testing::gaussian_features(17, 1, 0)), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InstanceTooLarge);
  }
  EXPECT_THROW(brute_force(dot_table(testing::two_blocks()), 0), Error);
  EXPECT_THROW(brute_force(dot_table(testing::two_blocks()), 3, 2), Error);
  EXPECT_NO_THROW(brute_force(dot_table(testing::gaussian_features(16, 1, 0)), 3));
}

TEST(BruteForceTest, EnumeratesEveryPlacement) {
  // The returned objective equals the minimum over an explicit subset walk.
  const auto x = testing::gaussian_features(9, 2, 31);
  const auto t = dot_table(x);
  double best = INFINITY;
  for (unsigned mask = 0; mask < (1u << 8); ++mask) {
    if (std::popcount(mask) != 3) continue;
    std::vector<std::size_t> cps;
    for (std::size_t b = 0; b < 8; ++b) {
      if (mask & (1u << b)) cps.push_back(b + 1);
    }
    best = std::min(best, testing::direct_objective(x, cps));
  }
  EXPECT_NEAR(brute_force(t, 4).objective, best, 1e-9);
}

TEST(CounterRngTest, PinnedStream) {
  // SplitMix64 reference outputs for seed 0.
  CounterRng rng(0);
  EXPECT_EQ(rng.next_u64(), 0xE220A8397B1DCDAFULL);
  EXPECT_EQ(rng.next_u64(), 0x6E789E6AA1B965F4ULL);
  EXPECT_EQ(rng.next_u64(), 0x06C45D188009454FULL);
  EXPECT_EQ(CounterRng::at(0, 2), 0x06C45D188009454FULL);
}

TEST(CounterRngTest, GaussianMoments) {
  CounterRng rng(7);
  double sum = 0.0;
  double sq = 0.0;
  const int count = 200000;
  for (int i = 0; i < count / 2; ++i) {
    auto [a, b] = rng.next_gaussian_pair();
    sum += a + b;
    sq += a * a + b * b;
  }
  EXPECT_NEAR(sum / count, 0.0, 0.01);
  EXPECT_NEAR(sq / count, 1.0, 0.01);
}

TEST(GenerateTest, DeterministicPerSeed) {
  const SyntheticConfig config{120, 6, 5, 3.0, 0.7, 1234};
  const auto a = generate(config);
  const auto b = generate(config);
  EXPECT_EQ(a.features, b.features);
  EXPECT_EQ(a.true_change_points, b.true_change_points);
}

TEST(GenerateTest, SeedsGiveDistinctPlacements) {
  std::set<std::vector<std::size_t>> seen;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    seen.insert(generate({200, 4, 6, 5.0, 1.0, seed}).true_change_points);
  }
  EXPECT_EQ(seen.size(), 25u);
}

TEST(GenerateTest, ChangePointsAreValid) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 2 + seed * 3;
    const std::size_t segments = 1 + seed % n;
    const auto inst = generate({n, 3, segments, 1.0, 1.0, seed});
    Segmentation s;
    s.n = n;
    s.m = segments;
    s.change_points = inst.true_change_points;
    EXPECT_NO_THROW(validate(s)) << seed;
  }
  EXPECT_NO_THROW(generate({5, 1, 5, 1.0, 0.0, 0}));
  EXPECT_NO_THROW(generate({1, 1, 1, 1.0, 0.0, 0}));
}

TEST(GenerateTest, MeansArePairwiseSeparated) {
  for (std::size_t d : {1u, 2u, 3u, 16u}) {
    for (std::size_t count : {2u, 5u, 8u, 40u}) {
      std::vector<std::vector<double>> means;
      for (std::size_t s = 0; s < count; ++s) means.push_back(segment_mean(s, count, d, 5.0));
      for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = i + 1; j < count; ++j) {
          double dist = 0.0;
          for (std::size_t c = 0; c < d; ++c) dist += std::pow(means[i][c] - means[j][c], 2);
          EXPECT_GE(std::sqrt(dist), 5.0 - 1e-12) << d << " " << count << " " << i << " " << j;
        }
      }
    }
  }
}

TEST(GenerateTest, ZeroNoiseIsPiecewiseConstantAndRecovered) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = generate({60, 4, 3, 2.0, 0.0, seed});
    const auto& cps = inst.true_change_points;
    for (std::size_t i = 1; i < 60; ++i) {
      const bool boundary = std::find(cps.begin(), cps.end(), i) != cps.end();
      const bool same = std::equal(inst.features.row(i).begin(), inst.features.row(i).end(),
                                   inst.features.row(i - 1).begin());
      EXPECT_EQ(same, !boundary);
    }
    const auto seg = solve_fixed(dot_table(inst.features), 3);
    EXPECT_EQ(seg.change_points, cps) << seed;
    EXPECT_NEAR(seg.objective, 0.0, 1e-9);
  }
}

TEST(GenerateTest, HighSnrRecoveryWithinOne) {
  const auto inst = generate({200, 16, 5, 5.0, 1.0, 42});
  const auto seg = solve_fixed(dot_table(inst.features), 5);
  ASSERT_EQ(seg.change_points.size(), inst.true_change_points.size());
  for (std::size_t i = 0; i < seg.change_points.size(); ++i) {
    const auto a = static_cast<long>(seg.change_points[i]);
    const auto b = static_cast<long>(inst.true_change_points[i]);
    EXPECT_LE(std::abs(a - b), 1) << i;
  }
}

TEST(GenerateTest, InfeasibleConfigs) {
  for (const SyntheticConfig& c :
       {SyntheticConfig{0, 1, 1, 1.0, 1.0, 0}, SyntheticConfig{5, 0, 1, 1.0, 1.0, 0},
        SyntheticConfig{5, 1, 6, 1.0, 1.0, 0}, SyntheticConfig{5, 1, 0, 1.0, 1.0, 0},
        SyntheticConfig{5, 1, 2, -1.0, 1.0, 0}, SyntheticConfig{5, 1, 2, 1.0, -0.5, 0}}) {
    try {
      generate(c);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::InfeasibleConfig);
    }
  }
}

}  // namespace
}  // namespace kts
