#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "nrsl/rng.hpp"

namespace nrsl {
namespace {

TEST(Rng, SameSeedSameSequence) {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(a.next(), b.next());
  }
}

TEST(Rng, StreamsAreIsolated) {
  // Draining one stream must not move another.
  Rng sel_a(7, 3, StreamPurpose::Selection);
  Rng slrrc_a(7, 3, StreamPurpose::Slrrc);
  for (int i = 0; i < 500; ++i) {
    (void)sel_a.next();
  }
  Rng slrrc_b(7, 3, StreamPurpose::Slrrc);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(slrrc_a.next(), slrrc_b.next());
  }
}

TEST(Rng, DerivedSeedsDiffer) {
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t drop = 0; drop < 4; ++drop) {
    for (UeId ue = 0; ue < 4; ++ue) {
      for (auto p : {StreamPurpose::Offset, StreamPurpose::Selection, StreamPurpose::Slrrc,
                     StreamPurpose::Keep, StreamPurpose::Shadowing}) {
        seeds.push_back(derive_seed(drop, ue, p));
      }
    }
  }
  std::sort(seeds.begin(), seeds.end());
  EXPECT_EQ(std::adjacent_find(seeds.begin(), seeds.end()), seeds.end());
}

TEST(Rng, UniformIntBoundsAndCoverage) {
  Rng rng(11);
  std::vector<int> hits(11, 0);
  for (int i = 0; i < 20000; ++i) {
    const auto v = rng.uniform_int(5, 15);
    ASSERT_GE(v, 5);
    ASSERT_LE(v, 15);
    ++hits[static_cast<std::size_t>(v - 5)];
  }
  for (int h : hits) {
    EXPECT_GT(h, 0);
  }
}

TEST(Rng, Uniform01Range) {
  Rng rng(3);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(Rng, BernoulliDegenerate) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_FALSE(rng.bernoulli(0.0));
    EXPECT_TRUE(rng.bernoulli(1.0));
  }
}

TEST(Rng, NormalMoments) {
  Rng rng(9);
  const int n = 100000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sq += x * x;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.0, 0.02);
  EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.02);
}

}  // namespace
}  // namespace nrsl
