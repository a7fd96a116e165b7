#pragma once

#include <cstddef>
#include <functional>

namespace cvxdiv {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tolerance = 1e-10;
  std::size_t max_evaluations = 2'000'000;
};

/// Adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
///
/// Intervals are bisected, largest error first, until the summed error
/// estimate drops below abs_tolerance or the evaluation budget is spent.
/// The endpoints are never evaluated, so integrable endpoint singularities
/// (quantile functions at 0 and 1) are fine.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureOptions& options = {});

/// As integrate(), but throws NumericalFailure when the tolerance is not met.
double integrate_or_throw(const std::function<double(double)>& f, double a,
                          double b, const QuadratureOptions& options = {});

}  // namespace cvxdiv
