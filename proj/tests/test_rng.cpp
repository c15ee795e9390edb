#include "gqrs/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using gqrs::CounterRng;

TEST(CounterRng, SameSeedGivesSameStream) {
  CounterRng a(42), b(42);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(a(), b());
}

TEST(CounterRng, DiscardMatchesDrawing) {
  CounterRng a(9), b(9);
  for (int i = 0; i < 17; ++i) a();
  b.discard(17);
  EXPECT_EQ(a.position(), b.position());
  EXPECT_EQ(a(), b());
}

TEST(CounterRng, UniformStaysInRangeWithCorrectMean) {
  CounterRng rng(1);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = rng.uniform_open();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(CounterRng, NormalMomentsMatchStandardNormal) {
  CounterRng rng(3);
  const int n = 200000;
  double s1 = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

TEST(CounterRng, BelowIsUnbiasedOverSmallRange) {
  CounterRng rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[rng.below(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 500);
}

TEST(CounterRng, PermutationIsAPermutation) {
  CounterRng rng(11);
  auto p = rng.permutation(100);
  std::sort(p.begin(), p.end());
  std::vector<std::size_t> expected(100);
  std::iota(expected.begin(), expected.end(), std::size_t{0});
  EXPECT_EQ(p, expected);
}

TEST(SeedDerivation, StreamsDifferAndAreStable) {
  EXPECT_NE(gqrs::derive_seed(1, 1), gqrs::derive_seed(1, 2));
  EXPECT_NE(gqrs::derive_seed(1, 1), gqrs::derive_seed(2, 1));
  EXPECT_EQ(gqrs::derive_seed(7, 3), gqrs::derive_seed(7, 3));
  EXPECT_NE(gqrs::hash_name("CdmMc"), gqrs::hash_name("CdmSobol"));
}
