#include <cmath>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "cvxdiv/errors.hpp"
#include "cvxdiv/oracle.hpp"
#include "cvxdiv/rng.hpp"
#include "test_oracles.hpp"

namespace cvxdiv::oracle {
namespace {

TEST(AnalyticCdf, QuantileInvertsEval) {
  for (const auto& F : {uniform_cdf(), power_cdf(2.0), power_cdf(0.5),
                        logistic_cdf(1.0, 2.0), exponential_cdf(3.0)}) {
    double prev = -1.0;
    for (int i = 1; i < 100; ++i) {
      const double u = i / 100.0;
      EXPECT_NEAR(F(F.quantile(u)), u, 1e-9) << F.name();
      EXPECT_GE(F(F.quantile(u)), prev);
      prev = F(F.quantile(u));
    }
  }
}

TEST(PopulationFunctional, Examples) {
  const auto h2 = power_generator(2);
  EXPECT_NEAR(population_functional(h2, uniform_cdf(), uniform_cdf()), 2.0 / 3, 1e-12);
  EXPECT_NEAR(population_functional(h2, logistic_cdf(0, 1), logistic_cdf(0, 1)), 2.0 / 3,
              1e-9);
  // ∫x²·2x dx + ∫x⁴ dx = 1/2 + 1/5.
  EXPECT_NEAR(population_functional(h2, uniform_cdf(), power_cdf(2.0)), 0.7, 1e-9);
  EXPECT_NEAR(population_functional(power_generator(3), power_cdf(3.0), power_cdf(3.0)),
              0.5, 1e-12);
}

TEST(PopulationFunctional, AgreesWithSimpson) {
  const auto h = power_generator(3);
  const auto F = logistic_cdf(0, 1);
  const auto G = logistic_cdf(0.5, 2);
  const double expected =
      testing::simpson([&](double u) { return u <= 0 || u >= 1 ? (u >= 1 ? 1.0 : 0.0)
                                                              : h(F(G.quantile(u))); },
                       0, 1, 200000) +
      testing::simpson([&](double u) { return u <= 0 || u >= 1 ? (u >= 1 ? 1.0 : 0.0)
                                                              : h(G(F.quantile(u))); },
                       0, 1, 200000);
  EXPECT_NEAR(population_functional(h, F, G), expected, 1e-8);
}

TEST(CvmDistance, ExamplesAndIdentity) {
  EXPECT_NEAR(cvm_distance(uniform_cdf(), uniform_cdf()), 0.0, 1e-15);
  // ∫₀¹(x - x²)²(1 + 2x)/2 dx = 1/30.
  EXPECT_NEAR(cvm_distance(uniform_cdf(), power_cdf(2.0)), 1.0 / 30, 1e-9);
  EXPECT_NEAR(testing::simpson([](double x) { return std::pow(x - x * x, 2) * (1 + 2 * x) / 2; },
                               0, 1, 1000),
              1.0 / 30, 1e-12);
  const auto h2 = power_generator(2);
  for (const auto& [F, G] : {std::pair{uniform_cdf(), power_cdf(3.0)},
                             std::pair{logistic_cdf(0, 1), logistic_cdf(1, 1)},
                             std::pair{exponential_cdf(1), exponential_cdf(2)}}) {
    EXPECT_NEAR(population_functional(h2, F, G) - 2.0 / 3, cvm_distance(F, G), 1e-8);
  }
}

TEST(MaxProbability, ExchangeableCases) {
  for (const int m : {1, 2, 5}) {
    const auto est = max_probability(m, uniform_cdf(), uniform_cdf(), 100000, 31 + m);
    EXPECT_NEAR(est.estimate, 1.0 / (m + 1), 4 * est.standard_error) << m;
  }
  const auto logistic = max_probability(2, logistic_cdf(0, 1), logistic_cdf(0, 1), 50000, 2);
  EXPECT_NEAR(logistic.estimate, 1.0 / 3, 4 * logistic.standard_error);
  EXPECT_THROW(max_probability(0, uniform_cdf(), uniform_cdf(), 10, 1), InvalidParameter);
}

TEST(JensenGap, Examples) {
  const auto h2 = power_generator(2);
  const WeightVector halves({0.5, 0.5});
  const std::vector<AnalyticCdf> pair{uniform_cdf(), power_cdf(2.0)};
  EXPECT_NEAR(jensen_gap(h2, pair, halves), 1.0 / 120, 1e-9);
  const std::vector<AnalyticCdf> equal{logistic_cdf(0, 1), logistic_cdf(0, 1)};
  EXPECT_NEAR(jensen_gap(h2, equal, halves), 0.0, 1e-8);
  const std::vector<AnalyticCdf> three{uniform_cdf(), uniform_cdf(), power_cdf(2.0)};
  EXPECT_GT(jensen_gap(h2, three, WeightVector::uniform(3)), 1e-6);
  const std::vector<AnalyticCdf> one{uniform_cdf()};
  EXPECT_THROW(jensen_gap(h2, one, WeightVector({1.0})), InvalidParameter);
}

TEST(JensenGap, ConcaveFlip) {
  const auto h = power_generator(3);
  const std::vector<AnalyticCdf> pair{uniform_cdf(), power_cdf(3.0)};
  const WeightVector w({0.3, 0.7});
  EXPECT_NEAR(jensen_gap(h.negated(), pair, w), -jensen_gap(h, pair, w), 1e-10);
}

TEST(LogConvexFunctional, Examples) {
  const auto xi = exp_sq_generator(1.0);
  EXPECT_NEAR(log_convex_functional(xi, uniform_cdf(), uniform_cdf()),
              2 * testing::kIntXiSq, 1e-7);
  const auto one = LogConvexGenerator::unchecked(
      "one", [](double) { return 1.0; }, [](double u) { return u; }, 1.0);
  EXPECT_NEAR(log_convex_functional(one, uniform_cdf(), power_cdf(2.0)), 2.0, 1e-12);
  // Frozen from 30-digit mpmath: ∫e^{u⁴+u²} + ∫e^{u+u²}.
  EXPECT_NEAR(log_convex_functional(xi, uniform_cdf(), power_cdf(2.0)),
              4.78514115782117078, 1e-8);
  EXPECT_GT(log_convex_functional(xi, uniform_cdf(), power_cdf(2.0)),
            2 * testing::kIntXiSq + 1e-6);
}

TEST(EnumerateNull, HandExamples) {
  StatisticSpec spec;
  spec.generator = power_generator(2);
  const auto one_one = enumerate_null(spec, std::vector<std::size_t>{1, 1});
  ASSERT_EQ(one_one.size(), 1u);
  EXPECT_NEAR(one_one[0].value, 1.0 / 3, 1e-15);
  EXPECT_EQ(one_one[0].probability, 1.0);

  const auto two_two = enumerate_null(spec, std::vector<std::size_t>{2, 2});
  ASSERT_EQ(two_two.size(), 2u);
  EXPECT_NEAR(two_two[0].value, 1.0 / 12, 1e-15);
  EXPECT_NEAR(two_two[0].probability, 4.0 / 6, 1e-15);
  EXPECT_NEAR(two_two[1].value, 1.0 / 3, 1e-15);
  EXPECT_NEAR(two_two[1].probability, 2.0 / 6, 1e-15);

  spec.generator = power_generator(5);
  const auto general = enumerate_null(spec, std::vector<std::size_t>{1, 1});
  EXPECT_NEAR(general[0].value, 1.0 - 2.0 / 6, 1e-15);  // h(1) - 2∫h
}

TEST(EnumerateNull, AgreesWithStatisticsModule) {
  // Every arrangement rebuilt as data must reproduce an enumerated value.
  StatisticSpec spec;
  spec.kind = StatisticKind::k_sample;
  spec.generator = power_generator(3);
  spec.weights = WeightVector({0.2, 0.3, 0.5});
  const std::vector<std::size_t> sizes{2, 2, 3};
  const auto pmf = enumerate_null(spec, sizes);
  double total = 0.0;
  for (const auto& p : pmf) total += p.probability;
  EXPECT_NEAR(total, 1.0, 1e-12);
  std::vector<int> labels{0, 0, 1, 1, 2, 2, 2};
  do {
    std::vector<std::vector<double>> groups(3);
    for (std::size_t pos = 0; pos < labels.size(); ++pos) {
      groups[static_cast<std::size_t>(labels[pos])].push_back(static_cast<double>(pos));
    }
    const std::vector<Sample> samples{Sample(groups[0]), Sample(groups[1]), Sample(groups[2])};
    const double v = spec.evaluate(samples).value;
    const bool found = std::any_of(pmf.begin(), pmf.end(), [&](const SupportPoint& p) {
      return std::abs(p.value - v) < 1e-12;
    });
    EXPECT_TRUE(found) << v;
  } while (std::next_permutation(labels.begin(), labels.end()));
}

TEST(EnumerateNull, TauSupport) {
  StatisticSpec spec;
  spec.kind = StatisticKind::tau;
  spec.generator = exp_sq_generator(1.0);
  const auto pmf = enumerate_null(spec, std::vector<std::size_t>{2, 2});
  const bool has_worked = std::any_of(pmf.begin(), pmf.end(), [](const SupportPoint& p) {
    return std::abs(p.value - testing::kTauWorked) < 1e-9;
  });
  EXPECT_TRUE(has_worked);
}

TEST(EnumerateNull, TooLarge) {
  StatisticSpec spec;
  spec.generator = power_generator(2);
  EXPECT_THROW(enumerate_null(spec, std::vector<std::size_t>{15, 15}), NumericalFailure);
  EXPECT_EQ(arrangement_count(std::vector<std::size_t>{2, 2}), 6.0);
  EXPECT_EQ(arrangement_count(std::vector<std::size_t>{2, 2, 3}), 210.0);
}

TEST(Battery, AllCasesPassAndExportCsv) {
  const auto cases = run_battery();
  EXPECT_GE(cases.size(), 60u);
  for (const auto& c : cases) {
    EXPECT_TRUE(c.passed) << c.id << " " << c.generator << " " << c.f << " " << c.g
                          << " gap=" << c.gap;
  }
  std::ostringstream csv;
  write_battery_csv(csv, cases);
  const std::string text = csv.str();
  EXPECT_EQ(text.rfind("case,h,F,G,gap,tolerance,pass\n", 0), 0u);
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')),
            cases.size() + 1);
}

}  // namespace
}  // namespace cvxdiv::oracle
