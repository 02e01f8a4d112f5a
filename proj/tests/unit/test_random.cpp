#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "rfamado/random.hpp"

using namespace rfamado;

TEST(SplitMix64, KnownSequence) {
  // Reference outputs of the published algorithm for seed 1234567.
  SplitMix64 rng(1234567);
  EXPECT_EQ(rng(), 6457827717110365317ULL);
  EXPECT_EQ(rng(), 3203168211198807973ULL);
  EXPECT_EQ(rng(), 9817491932198370423ULL);
}

TEST(SplitMix64, UniformIsOpenAndCentred) {
  SplitMix64 rng(7);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform_open();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(SplitMix64, BoundedIsUniform) {
  SplitMix64 rng(8);
  std::map<std::uint64_t, int> counts;
  const int n = 70000;
  for (int i = 0; i < n; ++i) ++counts[rng.bounded(7)];
  ASSERT_EQ(counts.size(), 7u);
  double chi2 = 0.0;
  for (const auto& [v, c] : counts) {
    EXPECT_LT(v, 7u);
    chi2 += (c - n / 7.0) * (c - n / 7.0) / (n / 7.0);
  }
  EXPECT_LT(chi2, 22.46);  // chi-square(6) 0.999 quantile
  EXPECT_EQ(rng.bounded(1), 0u);
}

TEST(SplitMix64, ExponentialMoments) {
  SplitMix64 rng(9);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = rng.exponential();
    ASSERT_GT(e, 0.0);
    s += e;
    s2 += e * e;
  }
  EXPECT_NEAR(s / n, 1.0, 0.01);
  EXPECT_NEAR(s2 / n, 2.0, 0.04);
}

TEST(DeriveSeed, DependsOnSeedAndKey) {
  EXPECT_EQ(derive_seed(1, "a"), derive_seed(1, "a"));
  EXPECT_NE(derive_seed(1, "a"), derive_seed(2, "a"));
  EXPECT_NE(derive_seed(1, "a"), derive_seed(1, "b"));
  EXPECT_NE(derive_seed(1, "ab"), derive_seed(1, "ba"));
}

TEST(FisherYates, AllPermutationsEquallyLikely) {
  SplitMix64 rng(10);
  std::map<std::vector<int>, int> counts;
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    std::vector<int> v{0, 1, 2, 3};
    fisher_yates_shuffle(std::span<int>(v), rng);
    ++counts[v];
  }
  ASSERT_EQ(counts.size(), 24u);
  double chi2 = 0.0;
  for (const auto& [perm, c] : counts) chi2 += (c - n / 24.0) * (c - n / 24.0) / (n / 24.0);
  EXPECT_LT(chi2, 49.73);  // chi-square(23) 0.999 quantile
}
