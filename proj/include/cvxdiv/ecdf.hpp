#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "cvxdiv/generators.hpp"

namespace cvxdiv {

/// A finite, nonempty sample of finite reals with a sorted copy.
class Sample {
 public:
  /// Throws DataError when empty or when any value is NaN or infinite.
  explicit Sample(std::vector<double> values, std::string label = {});

  std::span<const double> values() const { return values_; }
  std::span<const double> sorted() const { return sorted_; }
  std::size_t size() const { return values_.size(); }
  const std::string& label() const { return label_; }

 private:
  std::vector<double> values_;
  std::vector<double> sorted_;
  std::string label_;
};

enum class CdfConvention {
  right_continuous,  ///< F_n(x) = #{X_i <= x} / n
  mid,               ///< (F_n(x-) + F_n(x)) / 2
};

/// Step-function view over a Sample. The Sample must outlive the view.
class EmpiricalCdf {
 public:
  explicit EmpiricalCdf(const Sample& sample,
                        CdfConvention convention = CdfConvention::right_continuous)
      : sorted_(sample.sorted()), convention_(convention) {}

  /// O(log n). Throws InvalidParameter for non-finite x.
  double operator()(double x) const;

  std::size_t size() const { return sorted_.size(); }
  std::span<const double> sorted() const { return sorted_; }
  CdfConvention convention() const { return convention_; }

 private:
  std::span<const double> sorted_;
  CdfConvention convention_;
};

inline double cdf_eval(const EmpiricalCdf& F, double x) { return F(x); }

/// ∫ h(F_n) dG_m = (1/m) Σ_j h(F_n(Y_j)) over the sample behind G.
double integral_h_f_dg(const ConvexGenerator& h, const EmpiricalCdf& F,
                       const EmpiricalCdf& G);

/// ∫ ξ(G_m) dΞ(F_n): Σ over the distinct order statistics x of F's sample of
/// ξ(G_m(x)) times the jump of Ξ∘F_n at x. A value repeated r times from
/// rank i contributes one jump Ξ((i+r-1)/n) - Ξ((i-1)/n).
double integral_xi_dXi(const LogConvexGenerator& xi, const EmpiricalCdf& G,
                       const EmpiricalCdf& F);

/// Number of pairs (a_i, b_j) with a_i == b_j.
std::size_t cross_sample_ties(const Sample& a, const Sample& b);

/// One real per line; `#` starts a comment; blank lines skipped; a single
/// trailing comma is tolerated. Throws DataError citing `source` and the
/// line number for anything else.
Sample parse_sample(std::istream& in, const std::string& source);

Sample read_sample(const std::filesystem::path& path);

}  // namespace cvxdiv
