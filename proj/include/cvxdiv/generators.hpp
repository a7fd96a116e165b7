#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace cvxdiv {

/// A strictly convex h on [0,1] with h(0) = 0, plus the constant ∫₀¹ h.
///
/// Immutable after construction. Builders set `characterization_guaranteed`;
/// generators made through unchecked() carry false until validated, and
/// reports built on them say the equality characterization may not hold.
class ConvexGenerator {
 public:
  using Function = std::function<double(double)>;

  /// Wraps an arbitrary function without any checks.
  static ConvexGenerator unchecked(std::string name, Function eval,
                                   double integral_0_1);

  double operator()(double u) const { return eval_(u); }
  double eval(double u) const { return eval_(u); }
  double integral_0_1() const { return integral_; }
  const Function& eval_function() const { return eval_; }
  const std::string& name() const { return name_; }
  bool characterization_guaranteed() const { return guaranteed_; }

  /// -h, the concave mirror image. Never characterization-guaranteed.
  ConvexGenerator negated() const;

 private:
  friend ConvexGenerator make_convex(std::string, Function, double, bool);
  ConvexGenerator(std::string name, Function eval, double integral,
                  bool guaranteed)
      : name_(std::move(name)),
        eval_(std::move(eval)),
        integral_(integral),
        guaranteed_(guaranteed) {}

  std::string name_;
  Function eval_;
  double integral_;
  bool guaranteed_;
};

/// A positive ξ on [0,1] with strictly convex log ξ, its antiderivative
/// Ξ(u) = ∫₀ᵘ ξ and the constant ∫₀¹ ξ².
class LogConvexGenerator {
 public:
  using Function = std::function<double(double)>;

  static LogConvexGenerator unchecked(std::string name, Function eval,
                                      Function antiderivative,
                                      double integral_sq_0_1);

  double operator()(double u) const { return eval_(u); }
  double eval(double u) const { return eval_(u); }
  double antiderivative(double u) const { return antiderivative_(u); }
  double integral_sq_0_1() const { return integral_sq_; }
  const Function& eval_function() const { return eval_; }
  const std::string& name() const { return name_; }
  bool characterization_guaranteed() const { return guaranteed_; }

 private:
  friend LogConvexGenerator make_log_convex(std::string, Function, Function,
                                            double, bool);
  LogConvexGenerator(std::string name, Function eval, Function antiderivative,
                     double integral_sq, bool guaranteed)
      : name_(std::move(name)),
        eval_(std::move(eval)),
        antiderivative_(std::move(antiderivative)),
        integral_sq_(integral_sq),
        guaranteed_(guaranteed) {}

  std::string name_;
  Function eval_;
  Function antiderivative_;
  double integral_sq_;
  bool guaranteed_;
};

using Generator = std::variant<ConvexGenerator, LogConvexGenerator>;

/// h(u) = u^m, m >= 2.
ConvexGenerator power_generator(int m);

/// h(u) = Σ_{k=1}^{m} c_k u^k with coeffs[k-1] = c_k. All c_k >= 0 and some
/// c_k > 0 with k >= 2.
ConvexGenerator polynomial_generator(std::span<const double> coeffs);

/// Degree-m Bernstein polynomial of h with the k = 0 term dropped, so the
/// result vanishes at 0. Requires h(k/m) >= 0 for k = 1..m.
ConvexGenerator bernstein_generator(const ConvexGenerator& h, int m);

/// ξ(u) = exp(alpha u²), alpha > 0.
LogConvexGenerator exp_sq_generator(double alpha);

struct ValidationReport {
  bool passed = true;
  /// Description of the first violated probe; empty when passed.
  std::string first_violation;
  std::size_t probes = 0;
};

/// Probes the generator invariants on the grid u_i = i / grid_size,
/// i = 0..grid_size: h(0) = 0, strict midpoint convexity for every pair of
/// distinct grid points, and ∫₀¹h against adaptive quadrature (1e-10).
ValidationReport validate_generator(const ConvexGenerator& h, int grid_size);

/// Same for ξ: positivity, strict midpoint log-convexity, Ξ(0) = 0, Ξ
/// nondecreasing and matching quadrature of ξ, and ∫₀¹ξ² against quadrature.
ValidationReport validate_generator(const LogConvexGenerator& xi,
                                    int grid_size);

ValidationReport validate_generator(const Generator& g, int grid_size);

/// Parses `power:m`, `poly:c1,...,cm`, `bernstein:<inner-spec>:m` or
/// `expsq:alpha`. Throws ConfigurationError naming the offending token.
Generator parse_generator(std::string_view spec);

/// parse_generator() that insists on a convex (h) generator.
ConvexGenerator parse_convex_generator(std::string_view spec);

/// parse_generator() that insists on a log-convex (ξ) generator.
LogConvexGenerator parse_log_convex_generator(std::string_view spec);

const std::string& generator_name(const Generator& g);

}  // namespace cvxdiv
