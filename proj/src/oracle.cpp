#include "cvxdiv/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "cvxdiv/errors.hpp"
#include "cvxdiv/quadrature.hpp"
#include "cvxdiv/rng.hpp"

namespace cvxdiv::oracle {
namespace {

double quad(const std::function<double(double)>& f) {
  return integrate_or_throw(f, 0.0, 1.0, {kQuadratureTolerance, 2'000'000});
}

std::string num(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

}  // namespace

AnalyticCdf uniform_cdf() {
  return AnalyticCdf(
      "uniform", [](double x) { return std::clamp(x, 0.0, 1.0); },
      [](double u) { return u; });
}

AnalyticCdf power_cdf(double a) {
  if (!(a > 0.0)) throw InvalidParameter("power CDF needs a > 0");
  return AnalyticCdf(
      "x^" + num(a),
      [a](double x) { return x <= 0.0 ? 0.0 : x >= 1.0 ? 1.0 : std::pow(x, a); },
      [a](double u) { return std::pow(u, 1.0 / a); });
}

AnalyticCdf logistic_cdf(double location, double scale) {
  if (!(scale > 0.0)) throw InvalidParameter("logistic CDF needs scale > 0");
  return AnalyticCdf(
      "logistic(" + num(location) + "," + num(scale) + ")",
      [location, scale](double x) {
        return 1.0 / (1.0 + std::exp(-(x - location) / scale));
      },
      [location, scale](double u) {
        return location + scale * std::log(u / (1.0 - u));
      });
}

AnalyticCdf exponential_cdf(double rate) {
  if (!(rate > 0.0)) throw InvalidParameter("exponential CDF needs rate > 0");
  return AnalyticCdf(
      "exponential(" + num(rate) + ")",
      [rate](double x) { return x <= 0.0 ? 0.0 : -std::expm1(-rate * x); },
      [rate](double u) { return -std::log1p(-u) / rate; });
}

double cross_integral(const ConvexGenerator& h, const AnalyticCdf& Fj,
                      const AnalyticCdf& Fk) {
  return quad([&](double u) { return h(Fj(Fk.quantile(u))); });
}

double population_functional(const ConvexGenerator& h, const AnalyticCdf& F,
                             const AnalyticCdf& G) {
  return cross_integral(h, F, G) + cross_integral(h, G, F);
}

double cvm_distance(const AnalyticCdf& F, const AnalyticCdf& G) {
  // d((F+G)/2) splits into halves against dF and dG.
  const double against_f = quad([&](double u) {
    const double d = u - G(F.quantile(u));
    return d * d;
  });
  const double against_g = quad([&](double u) {
    const double d = F(G.quantile(u)) - u;
    return d * d;
  });
  return 0.5 * (against_f + against_g);
}

MonteCarloEstimate max_probability(int m, const AnalyticCdf& F,
                                   const AnalyticCdf& G, std::size_t N,
                                   std::uint64_t seed) {
  if (m < 1) throw InvalidParameter("max_probability needs m >= 1");
  if (N == 0) throw InvalidParameter("max_probability needs N >= 1");
  Stream stream(seed, 0);
  std::size_t hits = 0;
  for (std::size_t t = 0; t < N; ++t) {
    double max_x = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < m; ++j) max_x = std::max(max_x, F.quantile(stream.uniform()));
    const double y = G.quantile(stream.uniform());
    if (max_x < y) ++hits;
  }
  MonteCarloEstimate est;
  est.trials = N;
  est.estimate = static_cast<double>(hits) / static_cast<double>(N);
  est.standard_error =
      std::sqrt(est.estimate * (1.0 - est.estimate) / static_cast<double>(N));
  return est;
}

double jensen_gap(const ConvexGenerator& h, std::span<const AnalyticCdf> cdfs,
                  const WeightVector& w) {
  if (cdfs.size() < 2) throw InvalidParameter("jensen_gap needs k >= 2 CDFs");
  if (w.size() != cdfs.size()) {
    throw InvalidParameter("jensen_gap: weight/CDF count mismatch");
  }
  double lhs = 0.0;
  for (std::size_t j = 0; j < cdfs.size(); ++j) {
    for (std::size_t k = 0; k < cdfs.size(); ++k) {
      if (j != k) lhs += w[j] * w[k] * cross_integral(h, cdfs[j], cdfs[k]);
    }
  }
  return lhs - w.equality_factor() * h.integral_0_1();
}

double log_convex_functional(const LogConvexGenerator& xi, const AnalyticCdf& F,
                             const AnalyticCdf& G) {
  const double first = quad([&](double u) { return xi(G(F.quantile(u))) * xi(u); });
  const double second = quad([&](double u) { return xi(F(G.quantile(u))) * xi(u); });
  return first + second;
}

double arrangement_count(std::span<const std::size_t> sizes) {
  // Multinomial as a running product of binomials, exact while < 2^53.
  double count = 1.0;
  std::size_t placed = 0;
  for (const auto n : sizes) {
    for (std::size_t i = 1; i <= n; ++i) {
      count = count * static_cast<double>(placed + i) / static_cast<double>(i);
      if (count > 9007199254740992.0) return std::numeric_limits<double>::infinity();
    }
    placed += n;
  }
  return std::round(count);
}

namespace {

// Statistic of one label arrangement by direct rank counting. labels[p] is
// the sample that owns pooled rank p. No ties, so every cross-sample ECDF
// value is (number of owner's points strictly earlier) / size under either
// convention.
double arrangement_statistic(const StatisticSpec& spec,
                             std::span<const std::size_t> sizes,
                             std::span<const int> labels,
                             std::span<const double> xi_at_rank_a,
                             std::span<const double> xi_at_rank_b) {
  const std::size_t k = sizes.size();
  std::vector<std::size_t> seen(k, 0);

  if (spec.kind == StatisticKind::tau) {
    const auto& xi = std::get<LogConvexGenerator>(spec.generator);
    const double n0 = static_cast<double>(sizes[0]);
    const double n1 = static_cast<double>(sizes[1]);
    double first = 0.0;   // ∫ξ(G)dΞ(F), F = sample 0
    double second = 0.0;  // ∫ξ(F)dΞ(G)
    for (const int label : labels) {
      if (label == 0) {
        const std::size_t i = ++seen[0];
        first += xi(static_cast<double>(seen[1]) / n1) *
                 (xi_at_rank_a[i] - xi_at_rank_a[i - 1]);
      } else {
        const std::size_t i = ++seen[1];
        second += xi(static_cast<double>(seen[0]) / n0) *
                  (xi_at_rank_b[i] - xi_at_rank_b[i - 1]);
      }
    }
    return first + second - 2.0 * xi.integral_sq_0_1();
  }

  const auto& h = std::get<ConvexGenerator>(spec.generator);
  // cross[j][l] accumulates Σ over points of sample l of h(F_j(point)).
  std::vector<double> cross(k * k, 0.0);
  for (const int label : labels) {
    const auto l = static_cast<std::size_t>(label);
    for (std::size_t j = 0; j < k; ++j) {
      if (j == l) continue;
      cross[j * k + l] += h(static_cast<double>(seen[j]) / static_cast<double>(sizes[j]));
    }
    ++seen[l];
  }
  if (spec.kind == StatisticKind::two_sample) {
    const double lhs = cross[0 * k + 1] / static_cast<double>(sizes[1]) +
                       cross[1 * k + 0] / static_cast<double>(sizes[0]);
    return lhs - 2.0 * h.integral_0_1();
  }
  const WeightVector w = spec.weights ? *spec.weights : WeightVector::uniform(k);
  double lhs = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t l = 0; l < k; ++l) {
      if (j != l) lhs += w[j] * w[l] * cross[j * k + l] / static_cast<double>(sizes[l]);
    }
  }
  return lhs - w.equality_factor() * h.integral_0_1();
}

}  // namespace

std::vector<SupportPoint> enumerate_null(const StatisticSpec& spec,
                                         std::span<const std::size_t> sizes) {
  spec.check(sizes.size());
  for (const auto n : sizes) {
    if (n == 0) throw InvalidParameter("sample sizes must be >= 1");
  }
  const double total = arrangement_count(sizes);
  if (!(total <= 1e6)) {
    throw NumericalFailure("enumeration needs " + num(total) +
                           " arrangements; the limit is 1e6");
  }

  std::vector<double> xi_a;
  std::vector<double> xi_b;
  if (spec.kind == StatisticKind::tau) {
    const auto& xi = std::get<LogConvexGenerator>(spec.generator);
    for (std::size_t i = 0; i <= sizes[0]; ++i) {
      xi_a.push_back(xi.antiderivative(static_cast<double>(i) / static_cast<double>(sizes[0])));
    }
    for (std::size_t i = 0; i <= sizes[1]; ++i) {
      xi_b.push_back(xi.antiderivative(static_cast<double>(i) / static_cast<double>(sizes[1])));
    }
  }

  std::vector<int> labels;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    labels.insert(labels.end(), sizes[s], static_cast<int>(s));
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(total));
  do {
    values.push_back(arrangement_statistic(spec, sizes, labels, xi_a, xi_b));
  } while (std::next_permutation(labels.begin(), labels.end()));

  std::sort(values.begin(), values.end());
  std::vector<SupportPoint> pmf;
  for (const double v : values) {
    if (pmf.empty() || v - pmf.back().value > 1e-12) {
      pmf.push_back({v, 0.0, 0});
    }
    ++pmf.back().configurations;
  }
  for (auto& p : pmf) {
    p.probability = static_cast<double>(p.configurations) / static_cast<double>(values.size());
  }
  return pmf;
}

std::vector<BatteryCase> run_battery(std::uint64_t seed) {
  std::vector<BatteryCase> cases;
  const auto add = [&cases](std::string id, std::string h, std::string f,
                            std::string g, double gap, double tol, bool ok,
                            std::string check) {
    cases.push_back({std::move(id), std::move(h), std::move(f), std::move(g),
                     gap, tol, ok, std::move(check)});
  };

  const std::vector<double> quartic{0.0, 1.0, 0.0, 1.0};
  const std::vector<ConvexGenerator> generators{
      power_generator(2), power_generator(3), polynomial_generator(quartic),
      bernstein_generator(power_generator(2), 8)};
  const std::vector<std::pair<AnalyticCdf, AnalyticCdf>> distinct{
      {uniform_cdf(), power_cdf(2.0)},
      {uniform_cdf(), power_cdf(3.0)},
      {logistic_cdf(0.0, 1.0), logistic_cdf(0.0, 2.0)}};
  const std::vector<AnalyticCdf> singles{uniform_cdf(), power_cdf(2.0),
                                         logistic_cdf(0.0, 1.0)};

  for (const auto& h : generators) {
    const double centre = 2.0 * h.integral_0_1();
    for (const auto& [F, G] : distinct) {
      const double gap = population_functional(h, F, G) - centre;
      add("inequality", h.name(), F.name(), G.name(), gap, 1e-6, gap > 1e-6,
          "gap > tolerance");
      const double flipped = population_functional(h.negated(), F, G) - (-centre);
      add("concave-flip", h.name(), F.name(), G.name(), flipped + gap, 1e-10,
          std::abs(flipped + gap) <= 1e-10, "|gap(-h) + gap(h)| <= tolerance");
    }
    for (const auto& F : singles) {
      const double gap = population_functional(h, F, F) - centre;
      add("equality", h.name(), F.name(), F.name(), gap, 1e-8,
          std::abs(gap) < 1e-8, "|gap| < tolerance");
    }
  }

  const auto& square = generators[0];
  for (const auto& [F, G] : distinct) {
    const double excess = population_functional(square, F, G) - 2.0 / 3.0;
    const double cvm = cvm_distance(F, G);
    add("cvm-identity", square.name(), F.name(), G.name(), excess - cvm, 1e-8,
        std::abs(excess - cvm) < 1e-8, "|(functional - 2/3) - cvm| < tolerance");
  }

  const WeightVector halves({0.5, 0.5});
  {
    const std::vector<AnalyticCdf> pair{uniform_cdf(), power_cdf(2.0)};
    const double gap = jensen_gap(square, pair, halves);
    add("jensen-k2", square.name(), "x", "x^2", gap - 1.0 / 120.0, 1e-9,
        std::abs(gap - 1.0 / 120.0) < 1e-9, "|gap - 1/120| < tolerance");
    const std::vector<AnalyticCdf> same{uniform_cdf(), uniform_cdf()};
    const double zero = jensen_gap(square, same, halves);
    add("jensen-k2-equal", square.name(), "x", "x", zero, 1e-8,
        std::abs(zero) < 1e-8, "|gap| < tolerance");
    const std::vector<AnalyticCdf> three{uniform_cdf(), uniform_cdf(), power_cdf(2.0)};
    const double strict = jensen_gap(square, three, WeightVector::uniform(3));
    add("jensen-k3", square.name(), "x,x", "x^2", strict, 1e-6, strict > 1e-6,
        "gap > tolerance");
  }

  const LogConvexGenerator xi = exp_sq_generator(1.0);
  const double xi_centre = 2.0 * xi.integral_sq_0_1();
  for (const auto& F : singles) {
    const double gap = log_convex_functional(xi, F, F) - xi_centre;
    add("log-convex-equality", xi.name(), F.name(), F.name(), gap, 1e-7,
        std::abs(gap) < 1e-7, "|functional - 2 int xi^2| < tolerance");
  }
  for (const auto& [F, G] : distinct) {
    const double gap = log_convex_functional(xi, F, G) - xi_centre;
    add("log-convex-inequality", xi.name(), F.name(), G.name(), gap, 1e-6,
        gap > 1e-6, "gap > tolerance");
  }

  const std::vector<std::pair<AnalyticCdf, AnalyticCdf>> max_pairs{
      {uniform_cdf(), uniform_cdf()}, {uniform_cdf(), power_cdf(2.0)}};
  std::uint64_t stream_index = 0;
  for (const int m : {1, 2, 5}) {
    const auto power_m = ConvexGenerator::unchecked(
        "u^" + std::to_string(m), [m](double u) { return std::pow(u, m); },
        1.0 / (m + 1));
    for (const auto& [F, G] : max_pairs) {
      const double exact = cross_integral(power_m, F, G);
      const auto mc = max_probability(m, F, G, 100'000, mix64(seed + ++stream_index));
      const double bound = 4.0 * mc.standard_error;
      add("max-interpretation-m" + std::to_string(m), power_m.name(), F.name(),
          G.name(), mc.estimate - exact, bound,
          std::abs(mc.estimate - exact) < bound, "|MC - int F^m dG| < 4 SE");
    }
  }

  for (const auto& [F, G] : distinct) {
    const double whole = population_functional(generators[2], F, G);
    const double parts = population_functional(power_generator(2), F, G) +
                         population_functional(power_generator(4), F, G);
    add("polynomial-linearity", generators[2].name(), F.name(), G.name(),
        whole - parts, 1e-9, std::abs(whole - parts) <= 1e-9,
        "|f(sum c_k u^k) - sum c_k f(u^k)| <= tolerance");
  }

  for (const auto& [F, G] : distinct) {
    const double target = population_functional(square, F, G);
    double previous = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    double last = 0.0;
    for (const int m : {4, 8, 16, 32}) {
      last = std::abs(population_functional(bernstein_generator(square, m), F, G) - target);
      decreasing = decreasing && last < previous;
      previous = last;
    }
    add("bernstein-convergence", "bernstein:power:2:{4,8,16,32}", F.name(),
        G.name(), last, 0.0, decreasing, "error strictly decreasing in m");
  }
  return cases;
}

void write_battery_csv(std::ostream& out, std::span<const BatteryCase> cases) {
  out << "case,h,F,G,gap,tolerance,pass\n";
  char buf[64];
  const auto quote = [](const std::string& s) {
    return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
  };
  for (const auto& c : cases) {
    out << quote(c.id) << ',' << quote(c.generator) << ',' << quote(c.f) << ','
        << quote(c.g) << ',';
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,", c.gap, c.tolerance);
    out << buf << (c.passed ? "pass" : "fail") << '\n';
  }
}

}  // namespace cvxdiv::oracle
