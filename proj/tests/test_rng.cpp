#include <gtest/gtest.h>

#include <set>

#include "fedrl/rng.hpp"

using fedrl::derive_seed;
using fedrl::Rng;
namespace streams = fedrl::streams;

TEST(DeriveSeed, DistinctAcrossStreamsAndIndices) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s : {streams::kEnv, streams::kAgent, streams::kInit, streams::kSelect, streams::kEval})
    for (std::uint64_t i = 0; i < 100; ++i) seen.insert(derive_seed(0, s, i));
  EXPECT_EQ(seen.size(), 500u);
  EXPECT_NE(derive_seed(0, 1, 0), derive_seed(1, 1, 0));
  EXPECT_EQ(derive_seed(9, 2, 3), derive_seed(9, 2, 3));
}

TEST(Rng, SameSeedSameStream) {
  Rng a(123), b(123);
  for (int i = 0; i < 1000; ++i) {
    ASSERT_EQ(a.next_u64(), b.next_u64());
    ASSERT_EQ(a.normal(), b.normal());
  }
}

TEST(Rng, ReseedClearsCachedNormal) {
  Rng a(5);
  a.normal();  // leaves a spare
  a.reseed(5);
  Rng b(5);
  EXPECT_EQ(a.normal(), b.normal());
}

TEST(Rng, UniformRange) {
  Rng r(1);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = r.uniform(0.2, 0.5);
    ASSERT_GE(v, 0.2);
    ASSERT_LT(v, 0.5);
  }
}

TEST(Rng, BelowCoversRangeUniformly) {
  Rng r(2);
  std::array<int, 7> counts{};
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const auto k = r.below(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, n / 7, 400);
}

TEST(Rng, NormalMoments) {
  Rng r(3);
  const int n = 200000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.02);
}
