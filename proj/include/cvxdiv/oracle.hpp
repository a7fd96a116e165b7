#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cvxdiv/generators.hpp"
#include "cvxdiv/statistics.hpp"

namespace cvxdiv::oracle {

/// Population integrals are computed to this absolute tolerance.
inline constexpr double kQuadratureTolerance = 1e-9;

/// A continuous CDF with its quantile function.
class AnalyticCdf {
 public:
  using Function = std::function<double(double)>;

  AnalyticCdf(std::string name, Function eval, Function quantile)
      : name_(std::move(name)), eval_(std::move(eval)), quantile_(std::move(quantile)) {}

  double operator()(double x) const { return eval_(x); }
  double quantile(double u) const { return quantile_(u); }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  Function eval_;
  Function quantile_;
};

AnalyticCdf uniform_cdf();
/// F(x) = x^a on [0,1], a > 0.
AnalyticCdf power_cdf(double a);
AnalyticCdf logistic_cdf(double location, double scale);
AnalyticCdf exponential_cdf(double rate);

/// ∫ h(F_j) dF_k = ∫₀¹ h(F_j(F_k⁻¹(u))) du.
double cross_integral(const ConvexGenerator& h, const AnalyticCdf& Fj,
                      const AnalyticCdf& Fk);

/// ∫h(F)dG + ∫h(G)dF.
double population_functional(const ConvexGenerator& h, const AnalyticCdf& F,
                             const AnalyticCdf& G);

/// ∫(F - G)² d((F + G)/2).
double cvm_distance(const AnalyticCdf& F, const AnalyticCdf& G);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
};

/// P{max of m draws from F < one draw from G}, by N quantile-transform trials.
MonteCarloEstimate max_probability(int m, const AnalyticCdf& F,
                                   const AnalyticCdf& G, std::size_t N,
                                   std::uint64_t seed);

/// Σ_{j≠k} p_j p_k ∫h(F_j)dF_k - (1 - Σp²)∫₀¹h.
double jensen_gap(const ConvexGenerator& h, std::span<const AnalyticCdf> cdfs,
                  const WeightVector& w);

/// ∫ξ(G)dΞ(F) + ∫ξ(F)dΞ(G) = ∫₀¹ξ(G(F⁻¹(u)))ξ(u)du + ∫₀¹ξ(F(G⁻¹(u)))ξ(u)du.
double log_convex_functional(const LogConvexGenerator& xi, const AnalyticCdf& F,
                             const AnalyticCdf& G);

struct SupportPoint {
  double value = 0.0;
  double probability = 0.0;
  std::size_t configurations = 0;
};

/// Exact null law of the statistic: enumerates every distinct arrangement of
/// sample labels over the pooled ranks (equally likely under H0). Evaluates
/// each arrangement by rank counting, without the ECDF code path. Values
/// closer than 1e-12 are merged. Throws NumericalFailure when the number of
/// arrangements exceeds 10⁶.
std::vector<SupportPoint> enumerate_null(const StatisticSpec& spec,
                                         std::span<const std::size_t> sizes);

/// Number of distinct label arrangements, or +inf past 2^53.
double arrangement_count(std::span<const std::size_t> sizes);

struct BatteryCase {
  std::string id;
  std::string generator;
  std::string f;
  std::string g;
  double gap = 0.0;        ///< measured quantity (difference or excess)
  double tolerance = 0.0;  ///< bound it is compared against
  bool passed = false;
  std::string check;       ///< human description of the comparison
};

/// The fixed verification battery: strict inequality for F≠G, equality for
/// F=G, the Cramér-von Mises identity, the weighted k-sample gap, the
/// log-convex inequality, max-order-statistic Monte Carlo checks, polynomial
/// linearity, Bernstein convergence and the concave sign flip.
std::vector<BatteryCase> run_battery(std::uint64_t seed = 20240601);

/// Columns: case,h,F,G,gap,tolerance,pass.
void write_battery_csv(std::ostream& out, std::span<const BatteryCase> cases);

}  // namespace cvxdiv::oracle
