#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace tanglescope;

TEST(RepeatedFraction, Examples) {
  EXPECT_DOUBLE_EQ(repeated_fraction(4, 4), 0.90625);
  EXPECT_EQ(repeated_fraction(7, 1), 0.0);
  EXPECT_EQ(repeated_fraction(3, 5), 1.0);
  EXPECT_DOUBLE_EQ(repeated_fraction(100, 4), 1.0 - 100.0 * 99 * 98 * 97 / 1e8);  // 0.058906
  EXPECT_THROW(repeated_fraction(0, 2), std::invalid_argument);
  EXPECT_THROW(repeated_fraction(2, 0), std::invalid_argument);
}

TEST(RepeatedFraction, ExhaustiveOracle) {
  for (std::size_t m = 1; m <= 6; ++m)
    for (std::size_t n = 1; n <= 5; ++n) {
      std::size_t total = 1;
      for (std::size_t k = 0; k < n; ++k) total *= m;
      std::size_t repeats = 0;
      for (std::size_t x = 0; x < total; ++x) {
        std::vector<bool> seen(m, false);
        bool rep = false;
        for (std::size_t y = x, k = 0; k < n; ++k, y /= m) {
          rep = rep || seen[y % m];
          seen[y % m] = true;
        }
        repeats += rep;
      }
      EXPECT_DOUBLE_EQ(repeated_fraction(m, n), static_cast<double>(repeats) / static_cast<double>(total))
          << m << "," << n;
    }
}

TEST(RepeatedFraction, InverseMDecay) {
  double prev = 0.0;
  for (std::size_t m : {25u, 50u, 100u, 200u}) {
    const double f = repeated_fraction(m, 4);
    if (prev > 0.0) { EXPECT_NEAR(prev / f, 2.0, 2.0 * 0.15); }
    prev = f;
  }
}

TEST(Bound, TwoBlockExample) { EXPECT_DOUBLE_EQ(disjoint_bound(4, 2, 2), 8.0); }

TEST(CountStrings, TwoBlocksOrderTwo) {
  const auto sys = SyntheticSystem::uniform(2, 2);
  const auto c = count_strings_exact(sys, 2);
  EXPECT_EQ(c.total, 16u);
  EXPECT_LE(static_cast<double>(c.disjoint), disjoint_bound(4, 2, 2));
  EXPECT_EQ(c.total, c.single_cluster + c.joint + c.disjoint);
}

TEST(CountStrings, SingleClusterOnly) {
  const auto sys = SyntheticSystem::balanced(5, 1);
  const auto c = count_strings_exact(sys, 3);
  EXPECT_EQ(c.single_cluster, c.total);
  EXPECT_EQ(c.joint, 0u);
  EXPECT_EQ(c.disjoint, 0u);
}

TEST(CountStrings, BoundHoldsExhaustively) {
  for (std::size_t m = 1; m <= 8; ++m)
    for (std::size_t q = 1; q <= std::min<std::size_t>(4, m); ++q)
      for (std::size_t n = 1; n <= 4; ++n) {
        const auto sys = SyntheticSystem::balanced(m, q);
        const auto c = count_strings_exact(sys, n);
        EXPECT_EQ(c.total, c.single_cluster + c.joint + c.disjoint);
        EXPECT_LE(static_cast<double>(c.disjoint), disjoint_bound(m, n, q)) << m << " " << n << " " << q;
      }
}

TEST(CountStrings, ParallelMatchesSerial) {
  const auto sys = SyntheticSystem::balanced(9, 3);
  const auto a = count_strings_exact(sys, 5, 1);
  const auto b = count_strings_exact(sys, 5, 3);
  EXPECT_EQ(a.disjoint, b.disjoint);
  EXPECT_EQ(a.joint, b.joint);
  EXPECT_EQ(a.single_cluster, b.single_cluster);
}

TEST(CountStrings, MonteCarloWithinThreeSigma) {
  const auto sys = SyntheticSystem::uniform(3, 3);
  const auto exact = count_strings_exact(sys, 4);
  const auto mc = count_strings_mc(sys, 4, 400000, 17);
  EXPECT_FALSE(mc.exact);
  EXPECT_LE(std::abs(mc.disjoint_fraction() - exact.disjoint_fraction()), 3.0 * mc.disjoint_stderr);
  EXPECT_LE(mc.disjoint_ci_low, mc.disjoint_fraction());
  EXPECT_GE(mc.disjoint_ci_high, mc.disjoint_fraction());
}

TEST(CountStrings, MonteCarloSeedPinnedAndJobIndependent) {
  const auto sys = SyntheticSystem::uniform(8, 3);
  const auto a = count_strings_mc(sys, 4, 300000, 99, 1);
  const auto b = count_strings_mc(sys, 4, 300000, 99, 4);
  const auto c = count_strings_mc(sys, 4, 300000, 100, 1);
  EXPECT_EQ(a.disjoint, b.disjoint);
  EXPECT_EQ(a.joint, b.joint);
  EXPECT_NE(a.disjoint, c.disjoint);
  EXPECT_THROW(count_strings_mc(sys, 4, 0, 1), std::invalid_argument);
}

TEST(CountStrings, AutoFallsBackToMonteCarlo) {
  const auto sys = SyntheticSystem::uniform(40, 3);  // 120^4 > 1e8
  CountOptions o;
  o.trials = 20000;
  EXPECT_FALSE(count_strings(sys, 4, o).exact);
  EXPECT_THROW(count_strings_exact(sys, 4), std::length_error);
  EXPECT_TRUE(count_strings(SyntheticSystem::uniform(2, 2), 3, o).exact);
}

TEST(Decay, ExponentAtLeastInverseQ) {
  const auto r = decay_experiment(4, {4, 8, 16, 32}, 3, 2000000, 2024, 2);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_GE(r.alpha, 0.8);
  for (const auto& row : r.rows) EXPECT_LE(row.counts.disjoint_fraction(), row.bound_fraction);
}

TEST(Decay, ForcedOneBlockPerSubstring) {
  // Q = N blocks of size 1: every disjoint string visits each block at least twice.
  const auto sys = SyntheticSystem::uniform(4, 1);
  const auto c = count_strings_exact(sys, 4);
  EXPECT_LE(c.disjoint_fraction(), disjoint_bound(4, 4, 4) / 256.0);
  EXPECT_GT(c.disjoint, 0u);
}

TEST(Decay, Errors) {
  EXPECT_THROW(decay_experiment(4, {4, 8}, 3, 0, 1), std::invalid_argument);
  EXPECT_THROW(decay_experiment(4, {0, 8}, 3, 100, 1), std::invalid_argument);
  EXPECT_THROW(decay_experiment(4, {4, 8}, 0, 100, 1), std::invalid_argument);
  EXPECT_THROW(SyntheticSystem::balanced(3, 4), std::invalid_argument);
}

TEST(Random, SplitMixStreamsDiffer) {
  auto a = SplitMix64::stream(1, 0);
  auto b = SplitMix64::stream(1, 1);
  EXPECT_NE(a(), b());
  SplitMix64 c(5), d(5);
  EXPECT_EQ(c(), d());
  auto e = c.split();
  EXPECT_NE(e(), c());
  for (int i = 0; i < 1000; ++i) EXPECT_LT(d.bounded(7), 7u);
}
