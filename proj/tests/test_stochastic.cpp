#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "smp/error.hpp"
#include "smp/random.hpp"
#include "smp/stochastic.hpp"

namespace smp {
namespace {

TEST(Sampling, DeterministicForSameInputs) {
  const StochasticConfig c{8, 42, StochasticMode::Resampled};
  EXPECT_EQ(sample_stochastic(50, c, 3), sample_stochastic(50, c, 3));
}

TEST(Sampling, FixedModeIgnoresEpoch) {
  const StochasticConfig c{8, 42, StochasticMode::Fixed};
  EXPECT_EQ(sample_stochastic(20, c, 0), sample_stochastic(20, c, 500));
}

TEST(Sampling, ResampledEpochsAreUncorrelated) {
  const StochasticConfig c{32, 7, StochasticMode::Resampled};
  const DenseMatrix a = sample_stochastic(1000, c, 1);
  const DenseMatrix b = sample_stochastic(1000, c, 2);
  EXPECT_NE(a, b);
  double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    ab += a.data()[i] * b.data()[i];
    aa += a.data()[i] * a.data()[i];
    bb += b.data()[i] * b.data()[i];
  }
  EXPECT_LT(std::abs(ab / std::sqrt(aa * bb)), 0.05);
}

TEST(Sampling, DifferentSeedsDiffer) {
  EXPECT_NE(sample_stochastic(10, {4, 1, StochasticMode::Fixed}, 0), sample_stochastic(10, {4, 2, StochasticMode::Fixed}, 0));
}

TEST(Sampling, StandardNormalMoments) {
  // 320000 draws: mean SE 0.0018, variance SE 0.0025; bounds are far wider.
  const DenseMatrix e = sample_stochastic(10000, {32, 3, StochasticMode::Fixed}, 0);
  double s = 0, s2 = 0;
  for (double x : e.data()) {
    s += x;
    s2 += x * x;
  }
  const double n = static_cast<double>(e.data().size());
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  EXPECT_GT(mean, -0.03);
  EXPECT_LT(mean, 0.03);
  EXPECT_GT(var, 0.96);
  EXPECT_LT(var, 1.04);
}

TEST(Sampling, CounterUniformInUnitInterval) {
  for (std::uint64_t c = 0; c < 10000; ++c) {
    const double u = counter_uniform(99, c);
    EXPECT_GT(u, 0.0);
    EXPECT_LE(u, 1.0);
  }
}

TEST(Seeds, LabelsSeparateStreams) {
  EXPECT_NE(derive_seed(1, "a"), derive_seed(1, "b"));
  EXPECT_NE(derive_seed(1, "a"), derive_seed(2, "a"));
  EXPECT_EQ(derive_seed(5, "split"), derive_seed(5, "split"));
}

TEST(ChiMean, HalfNormalAtOneDegree) { EXPECT_NEAR(chi_mean(1), std::sqrt(2.0 / std::numbers::pi), 1e-15); }

TEST(ChiMean, ConsecutiveProductRecurrence) {
  // mu_d * mu_{d+1} = d follows from Gamma(x+1) = x Gamma(x).
  for (std::size_t d = 1; d < 200; ++d) EXPECT_NEAR(chi_mean(d) * chi_mean(d + 1), static_cast<double>(d), 1e-9 * d);
}

TEST(ChiCheck, SampleMeanWithinThreeStandardErrors) {
  const DenseMatrix e = sample_stochastic(2000, {32, 11, StochasticMode::Fixed}, 0);
  const ChiDistanceStats s = chi_distance_check(e, 10000, 11);
  EXPECT_EQ(s.dim, 32u);
  EXPECT_NEAR(s.analytic_mean, chi_mean(32), 0.0);
  EXPECT_LT(std::abs(s.sample_mean - s.analytic_mean), 3.0 * s.standard_error);
  EXPECT_NEAR(s.sample_variance, s.analytic_variance, 0.1);
}

TEST(ChiCheck, IdenticalRowsGiveZeroDistance) {
  const DenseMatrix e{{0.5, -1.0}, {0.5, -1.0}};
  const ChiDistanceStats s = chi_distance_check(e, 10, 1);
  EXPECT_EQ(s.sample_mean, 0.0);
}

TEST(ChiCheck, NeedsTwoRows) {
  EXPECT_THROW(chi_distance_check(DenseMatrix(1, 3), 10, 1), ContractViolation);
}

}  // namespace
}  // namespace smp
