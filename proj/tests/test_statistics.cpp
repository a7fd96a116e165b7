#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "cvxdiv/errors.hpp"
#include "cvxdiv/statistics.hpp"
#include "test_oracles.hpp"

namespace cvxdiv {
namespace {

Sample make(std::vector<double> v) { return Sample(std::move(v)); }

std::vector<double> draw(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

TEST(TwoSample, WorkedExample) {
  const auto s = two_sample_statistic(power_generator(2), make({1, 3}), make({2, 4}));
  EXPECT_NEAR(s.value, 1.0 / 12.0, 1e-15);
  EXPECT_EQ(s.raw_functional, 0.75);
  EXPECT_EQ(s.centering_constant, 2.0 / 3.0);
  EXPECT_EQ(s.value, s.raw_functional - s.centering_constant);
  EXPECT_EQ(s.tie_count, 0u);
  EXPECT_EQ(s.generator_name, "power:2");
}

TEST(TwoSample, IdenticalSamplesHavePositiveFiniteSampleBias) {
  // 2·(1/n)Σ(i/n)² - 2/3 = (n+1)(2n+1)/(3n²) - 2/3.
  for (const std::size_t n : {2u, 5u, 40u}) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<double>(i);
    const auto s = two_sample_statistic(power_generator(2), make(v), make(v));
    const double dn = static_cast<double>(n);
    EXPECT_NEAR(s.value, (dn + 1) * (2 * dn + 1) / (3 * dn * dn) - 2.0 / 3.0, 1e-15);
    EXPECT_EQ(s.tie_count, n);
  }
  const auto s2 = two_sample_statistic(power_generator(2), make({0, 1}), make({0, 1}));
  EXPECT_NEAR(s2.value, 7.0 / 12.0, 1e-15);
}

TEST(TwoSample, SymmetricExactly) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 30; ++t) {
    const auto x = make(draw(rng, 1 + t % 13));
    const auto y = make(draw(rng, 2 + t % 7));
    for (const auto& h : {power_generator(2), bernstein_generator(power_generator(3), 5)}) {
      EXPECT_EQ(two_sample_statistic(h, x, y).value, two_sample_statistic(h, y, x).value);
    }
  }
}

TEST(TwoSample, RankInvariantBitForBit) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 20; ++t) {
    auto a = draw(rng, 10 + t);
    auto b = draw(rng, 8 + t);
    const auto base = two_sample_statistic(power_generator(3), make(a), make(b)).value;
    const auto tau_base = tau_statistic(exp_sq_generator(1.0), make(a), make(b)).value;
    for (auto& v : a) v = v * v * v + v;
    for (auto& v : b) v = v * v * v + v;
    EXPECT_EQ(two_sample_statistic(power_generator(3), make(a), make(b)).value, base);
    EXPECT_EQ(tau_statistic(exp_sq_generator(1.0), make(a), make(b)).value, tau_base);
  }
}

TEST(TwoSample, MatchesBruteForce) {
  std::mt19937_64 rng(9);
  const auto h = power_generator(4);
  for (int t = 0; t < 20; ++t) {
    const auto a = draw(rng, 3 + t);
    const auto b = draw(rng, 4 + t / 3);
    const double expected =
        testing::brute_cross(h, a, b) + testing::brute_cross(h, b, a) - 0.4;
    EXPECT_NEAR(two_sample_statistic(h, make(a), make(b)).value, expected, 1e-14);
  }
}

TEST(WeightVector, Validation) {
  EXPECT_NEAR(WeightVector::uniform(3).equality_factor(), 2.0 / 3.0, 1e-15);
  EXPECT_EQ(WeightVector({0.5, 0.5}).equality_factor(), 0.5);
  EXPECT_THROW(WeightVector({0.5, 0.6}), InvalidParameter);
  EXPECT_THROW(WeightVector({1.2, -0.2}), InvalidParameter);
  EXPECT_THROW(WeightVector({}), InvalidParameter);
  EXPECT_THROW(WeightVector({0.0, 1.0}), InvalidParameter);
}

TEST(KSample, WorkedExample) {
  const std::vector<Sample> samples{make({1, 3}), make({2, 4})};
  const auto s = k_sample_statistic(power_generator(2), samples, WeightVector({0.5, 0.5}));
  EXPECT_NEAR(s.value, 1.0 / 48.0, 1e-15);
  EXPECT_EQ(s.centering_constant, 0.5 * (1.0 / 3.0));
}

TEST(KSample, TwoGroupsIsQuarterOfTwoSample) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 25; ++t) {
    const std::vector<Sample> samples{make(draw(rng, 2 + t)), make(draw(rng, 3 + t % 4))};
    const auto h = power_generator(2 + t % 3);
    const double k2 = k_sample_statistic(h, samples, WeightVector({0.5, 0.5})).value;
    const double two = two_sample_statistic(h, samples[0], samples[1]).value;
    EXPECT_NEAR(k2, two / 4.0, 1e-15);
  }
}

TEST(KSample, MatchesBruteForceWithUnequalWeights) {
  std::mt19937_64 rng(8);
  const auto h = power_generator(2);
  const std::vector<double> p{0.2, 0.3, 0.5};
  std::vector<std::vector<double>> raw{draw(rng, 6), draw(rng, 9), draw(rng, 4)};
  std::vector<Sample> samples;
  for (const auto& r : raw) samples.push_back(make(r));
  double expected = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = 0; k < 3; ++k) {
      if (j != k) expected += p[j] * p[k] * testing::brute_cross(h, raw[j], raw[k]);
    }
  }
  expected -= (1.0 - (0.04 + 0.09 + 0.25)) / 3.0;
  EXPECT_NEAR(k_sample_statistic(h, samples, WeightVector(p)).value, expected, 1e-14);
}

TEST(KSample, Errors) {
  const std::vector<Sample> one{make({1})};
  EXPECT_THROW(k_sample_statistic(power_generator(2), one, WeightVector({1.0})),
               InvalidParameter);
  const std::vector<Sample> two{make({1}), make({2})};
  EXPECT_THROW(k_sample_statistic(power_generator(2), two, WeightVector::uniform(3)),
               InvalidParameter);
}

TEST(Tau, ConstantXiIsZero) {
  const auto one = LogConvexGenerator::unchecked(
      "one", [](double) { return 1.0; }, [](double u) { return u; }, 1.0);
  const auto s = tau_statistic(one, make({1, 5, 2}), make({0, 3}));
  EXPECT_DOUBLE_EQ(s.raw_functional, 2.0);
  EXPECT_EQ(s.centering_constant, 2.0);
  EXPECT_NEAR(s.value, 0.0, 1e-15);
}

TEST(Tau, WorkedExample) {
  const auto s = tau_statistic(exp_sq_generator(1.0), make({1, 3}), make({2, 4}));
  EXPECT_NEAR(s.raw_functional, testing::kTauWorkedRaw, 1e-9);
  EXPECT_NEAR(s.centering_constant, 2 * testing::kIntXiSq, 1e-9);
  EXPECT_NEAR(s.value, testing::kTauWorked, 1e-9);
}

TEST(StatisticSpec, ChecksKindAgainstGenerator) {
  StatisticSpec spec;
  spec.kind = StatisticKind::tau;
  EXPECT_THROW(spec.check(2), InvalidParameter);
  spec.generator = exp_sq_generator(1.0);
  EXPECT_NO_THROW(spec.check(2));
  EXPECT_THROW(spec.check(3), InvalidParameter);
  spec.kind = StatisticKind::two_sample;
  EXPECT_THROW(spec.check(2), InvalidParameter);
  spec.kind = StatisticKind::k_sample;
  spec.generator = power_generator(2);
  spec.weights = WeightVector({0.5, 0.5});
  EXPECT_THROW(spec.check(3), InvalidParameter);
  EXPECT_EQ(parse_statistic_kind("k_sample"), StatisticKind::k_sample);
  EXPECT_THROW(parse_statistic_kind("ks"), ConfigurationError);
}

TEST(MidConvention, AgreesWithRightContinuousWithoutCrossTies) {
  std::mt19937_64 rng(12);
  const auto a = make(draw(rng, 15));
  const auto b = make(draw(rng, 11));
  const auto h = power_generator(2);
  EXPECT_EQ(two_sample_statistic(h, a, b, CdfConvention::mid).value,
            two_sample_statistic(h, a, b).value);
  // With cross ties the conventions differ.
  const auto c = make({1, 2, 3});
  const auto d = make({2, 3, 4});
  EXPECT_NE(two_sample_statistic(h, c, d, CdfConvention::mid).value,
            two_sample_statistic(h, c, d).value);
}

}  // namespace
}  // namespace cvxdiv
