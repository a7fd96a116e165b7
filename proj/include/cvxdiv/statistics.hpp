#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvxdiv/ecdf.hpp"
#include "cvxdiv/generators.hpp"

namespace cvxdiv {

/// Positive weights p_1..p_k summing to 1 (within 1e-12).
class WeightVector {
 public:
  explicit WeightVector(std::vector<double> weights);
  static WeightVector uniform(std::size_t k);

  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  double operator[](std::size_t j) const { return weights_[j]; }
  /// 1 - Σ p_j².
  double equality_factor() const;

 private:
  std::vector<double> weights_;
};

struct StatisticValue {
  double value = 0.0;  ///< raw_functional - centering_constant
  double raw_functional = 0.0;
  double centering_constant = 0.0;
  std::size_t tie_count = 0;
  std::string generator_name;
};

/// ∫h(F_n)dG_m + ∫h(G_m)dF_n - 2∫₀¹h.
StatisticValue two_sample_statistic(
    const ConvexGenerator& h, const Sample& x, const Sample& y,
    CdfConvention convention = CdfConvention::right_continuous);

/// Σ_{j≠k} p_j p_k ∫h(F_j)dF_k - (1 - Σp²)∫₀¹h over ordered pairs.
StatisticValue k_sample_statistic(
    const ConvexGenerator& h, std::span<const Sample> samples,
    const WeightVector& w,
    CdfConvention convention = CdfConvention::right_continuous);

/// ∫ξ(G_m)dΞ(F_n) + ∫ξ(F_n)dΞ(G_m) - 2∫₀¹ξ².
StatisticValue tau_statistic(
    const LogConvexGenerator& xi, const Sample& x, const Sample& y,
    CdfConvention convention = CdfConvention::right_continuous);

enum class StatisticKind { two_sample, k_sample, tau };

std::string_view to_string(StatisticKind kind);
/// Accepts two_sample, k_sample, tau. Throws ConfigurationError otherwise.
StatisticKind parse_statistic_kind(std::string_view text);

/// A fully specified statistic: kind, generator, and (k_sample) weights.
struct StatisticSpec {
  StatisticKind kind = StatisticKind::two_sample;
  Generator generator = power_generator(2);
  std::optional<WeightVector> weights;  ///< k_sample only; uniform if unset
  CdfConvention convention = CdfConvention::right_continuous;

  /// Checks that the generator family matches the kind and that
  /// `sample_count` fits it. Throws InvalidParameter.
  void check(std::size_t sample_count) const;

  StatisticValue evaluate(std::span<const Sample> samples) const;
};

}  // namespace cvxdiv
