#include <gtest/gtest.h>

#include <algorithm>

#include "april/oracle.hpp"

using namespace april;

TEST(Lno, PublishedPointValues) {
  EXPECT_NEAR(lno_prefer_probability(5.02, 3.99, 2.14), 0.618, 1e-3);
  EXPECT_NEAR(lno_prefer_probability(6.52, 1.46, 2.14), 0.914, 1e-3);
}

TEST(Lno, SymmetricAndHalfAtTies) {
  EXPECT_DOUBLE_EQ(lno_prefer_probability(4, 4, 2.14), 0.5);
  EXPECT_NEAR(lno_prefer_probability(7, 2, 1.3) + lno_prefer_probability(2, 7, 1.3), 1.0, 1e-15);
  EXPECT_THROW(lno_prefer_probability(1, 2, 0.0), Error);
}

TEST(Lno, EmpiricalRateMatchesProbability) {
  LnoOracle o(2.14, 5);
  int left = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) left += o.prefer(5.02, 3.99) == Direction::left_preferred;
  // Binomial standard error is about 0.0015.
  EXPECT_NEAR(static_cast<double>(left) / n, 0.618, 0.006);
}

TEST(PerfectOracle, PicksHigherAndLeftOnTies) {
  PerfectOracle o;
  EXPECT_EQ(o.prefer(1, 2), Direction::right_preferred);
  EXPECT_EQ(o.prefer(3, 2), Direction::left_preferred);
  EXPECT_EQ(o.prefer(2, 2), Direction::left_preferred);
}

TEST(FitM, RecoversTrueFlatness) {
  std::vector<double> fits;
  for (std::uint64_t seed = 1; seed <= 5; ++seed)
    fits.push_back(fit_m(synthetic_noisy_preferences(10000, 2.14, 7.0, seed)));
  std::sort(fits.begin(), fits.end());
  EXPECT_GE(fits[2], 1.99);
  EXPECT_LE(fits[2], 2.29);
}

TEST(FitM, LikelihoodPeaksAtFit) {
  const auto recs = synthetic_noisy_preferences(2000, 1.0, 5.0, 3);
  const double m = fit_m(recs);
  const double ll = lno_log_likelihood(recs, m);
  EXPECT_GE(ll, lno_log_likelihood(recs, m * 1.05));
  EXPECT_GE(ll, lno_log_likelihood(recs, m / 1.05));
}

TEST(FitM, NoiselessDataHitsLowerBound) {
  std::vector<NoisyPreference> recs{{3, 1, Direction::left_preferred}, {1, 4, Direction::right_preferred}};
  EXPECT_NEAR(fit_m(recs), 1e-3, 1e-6);
}

TEST(FitM, AllTiesIsError) {
  std::vector<NoisyPreference> recs{{3, 3, Direction::left_preferred}};
  EXPECT_THROW(fit_m(recs), Error);
}
