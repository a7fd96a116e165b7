#include "cvxdiv/statistics.hpp"

#include <cmath>

#include "cvxdiv/errors.hpp"

namespace cvxdiv {

WeightVector::WeightVector(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw InvalidParameter("weight vector is empty");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < weights_.size(); ++j) {
    if (!(weights_[j] > 0.0) || !std::isfinite(weights_[j])) {
      throw InvalidParameter("weight p_" + std::to_string(j + 1) +
                             " must be positive and finite");
    }
    total += weights_[j];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw InvalidParameter("weights must sum to 1, got " + std::to_string(total));
  }
}

WeightVector WeightVector::uniform(std::size_t k) {
  if (k == 0) throw InvalidParameter("uniform weights need k >= 1");
  return WeightVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

double WeightVector::equality_factor() const {
  double sum_sq = 0.0;
  for (const double p : weights_) sum_sq += p * p;
  return 1.0 - sum_sq;
}

StatisticValue two_sample_statistic(const ConvexGenerator& h, const Sample& x,
                                    const Sample& y, CdfConvention convention) {
  const EmpiricalCdf fx(x, convention);
  const EmpiricalCdf gy(y, convention);
  StatisticValue s;
  s.raw_functional = integral_h_f_dg(h, fx, gy) + integral_h_f_dg(h, gy, fx);
  s.centering_constant = 2.0 * h.integral_0_1();
  s.value = s.raw_functional - s.centering_constant;
  s.tie_count = cross_sample_ties(x, y);
  s.generator_name = h.name();
  return s;
}

StatisticValue k_sample_statistic(const ConvexGenerator& h,
                                  std::span<const Sample> samples,
                                  const WeightVector& w,
                                  CdfConvention convention) {
  if (samples.size() < 2) {
    throw InvalidParameter("k-sample statistic needs at least two samples");
  }
  if (w.size() != samples.size()) {
    throw InvalidParameter("got " + std::to_string(w.size()) + " weights for " +
                           std::to_string(samples.size()) + " samples");
  }
  std::vector<EmpiricalCdf> cdfs;
  cdfs.reserve(samples.size());
  for (const auto& s : samples) cdfs.emplace_back(s, convention);

  StatisticValue s;
  for (std::size_t j = 0; j < cdfs.size(); ++j) {
    for (std::size_t k = 0; k < cdfs.size(); ++k) {
      if (j == k) continue;
      s.raw_functional += w[j] * w[k] * integral_h_f_dg(h, cdfs[j], cdfs[k]);
    }
    for (std::size_t k = j + 1; k < samples.size(); ++k) {
      s.tie_count += cross_sample_ties(samples[j], samples[k]);
    }
  }
  s.centering_constant = w.equality_factor() * h.integral_0_1();
  s.value = s.raw_functional - s.centering_constant;
  s.generator_name = h.name();
  return s;
}

StatisticValue tau_statistic(const LogConvexGenerator& xi, const Sample& x,
                             const Sample& y, CdfConvention convention) {
  const EmpiricalCdf fx(x, convention);
  const EmpiricalCdf gy(y, convention);
  StatisticValue s;
  s.raw_functional = integral_xi_dXi(xi, gy, fx) + integral_xi_dXi(xi, fx, gy);
  s.centering_constant = 2.0 * xi.integral_sq_0_1();
  s.value = s.raw_functional - s.centering_constant;
  s.tie_count = cross_sample_ties(x, y);
  s.generator_name = xi.name();
  return s;
}

std::string_view to_string(StatisticKind kind) {
  switch (kind) {
    case StatisticKind::two_sample: return "two_sample";
    case StatisticKind::k_sample: return "k_sample";
    case StatisticKind::tau: return "tau";
  }
  return "?";
}

StatisticKind parse_statistic_kind(std::string_view text) {
  if (text == "two_sample") return StatisticKind::two_sample;
  if (text == "k_sample") return StatisticKind::k_sample;
  if (text == "tau") return StatisticKind::tau;
  throw ConfigurationError("unknown statistic kind '" + std::string(text) + "'");
}

void StatisticSpec::check(std::size_t sample_count) const {
  const bool convex = std::holds_alternative<ConvexGenerator>(generator);
  switch (kind) {
    case StatisticKind::two_sample:
    case StatisticKind::tau:
      if (sample_count != 2) {
        throw InvalidParameter(std::string(to_string(kind)) +
                               " statistic needs exactly two samples, got " +
                               std::to_string(sample_count));
      }
      if (convex != (kind == StatisticKind::two_sample)) {
        throw InvalidParameter(kind == StatisticKind::tau
                                   ? "tau statistic needs a log-convex generator"
                                   : "two-sample statistic needs a convex generator");
      }
      break;
    case StatisticKind::k_sample:
      if (sample_count < 2) {
        throw InvalidParameter("k-sample statistic needs at least two samples");
      }
      if (!convex) {
        throw InvalidParameter("k-sample statistic needs a convex generator");
      }
      if (weights && weights->size() != sample_count) {
        throw InvalidParameter("got " + std::to_string(weights->size()) +
                               " weights for " + std::to_string(sample_count) +
                               " samples");
      }
      break;
  }
}

StatisticValue StatisticSpec::evaluate(std::span<const Sample> samples) const {
  check(samples.size());
  switch (kind) {
    case StatisticKind::two_sample:
      return two_sample_statistic(std::get<ConvexGenerator>(generator),
                                  samples[0], samples[1], convention);
    case StatisticKind::k_sample:
      return k_sample_statistic(
          std::get<ConvexGenerator>(generator), samples,
          weights ? *weights : WeightVector::uniform(samples.size()), convention);
    case StatisticKind::tau:
      return tau_statistic(std::get<LogConvexGenerator>(generator), samples[0],
                           samples[1], convention);
  }
  throw InvalidParameter("unknown statistic kind");
}

}  // namespace cvxdiv
