#include "cvxdiv/ecdf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>

#include "cvxdiv/errors.hpp"

namespace cvxdiv {

Sample::Sample(std::vector<double> values, std::string label)
    : values_(std::move(values)), label_(std::move(label)) {
  if (values_.empty()) {
    throw DataError("sample '" + label_ + "' is empty");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw DataError("sample '" + label_ + "' has a non-finite value at index " +
                      std::to_string(i));
    }
  }
  sorted_ = values_;
  std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalCdf::operator()(double x) const {
  if (!std::isfinite(x)) {
    throw InvalidParameter("ECDF evaluated at a non-finite point");
  }
  const auto n = static_cast<double>(sorted_.size());
  const auto at_or_below = std::upper_bound(sorted_.begin(), sorted_.end(), x);
  const double right = static_cast<double>(at_or_below - sorted_.begin()) / n;
  if (convention_ == CdfConvention::right_continuous) return right;
  const auto below = std::lower_bound(sorted_.begin(), at_or_below, x);
  const double left = static_cast<double>(below - sorted_.begin()) / n;
  return 0.5 * (left + right);
}

double integral_h_f_dg(const ConvexGenerator& h, const EmpiricalCdf& F,
                       const EmpiricalCdf& G) {
  double sum = 0.0;
  for (const double y : G.sorted()) sum += h(F(y));
  return sum / static_cast<double>(G.size());
}

double integral_xi_dXi(const LogConvexGenerator& xi, const EmpiricalCdf& G,
                       const EmpiricalCdf& F) {
  const auto xs = F.sorted();
  const std::size_t n = xs.size();
  const auto dn = static_cast<double>(n);
  double sum = 0.0;
  double xi_lower = xi.antiderivative(0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && xs[j] == xs[i]) ++j;
    const double xi_upper = xi.antiderivative(static_cast<double>(j) / dn);
    sum += xi(G(xs[i])) * (xi_upper - xi_lower);
    xi_lower = xi_upper;
    i = j;
  }
  return sum;
}

std::size_t cross_sample_ties(const Sample& a, const Sample& b) {
  const auto sa = a.sorted();
  const auto sb = b.sorted();
  std::size_t ties = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < sa.size() && j < sb.size()) {
    if (sa[i] < sb[j]) {
      ++i;
    } else if (sb[j] < sa[i]) {
      ++j;
    } else {
      const double v = sa[i];
      std::size_t ra = 0;
      std::size_t rb = 0;
      while (i < sa.size() && sa[i] == v) ++i, ++ra;
      while (j < sb.size() && sb[j] == v) ++j, ++rb;
      ties += ra * rb;
    }
  }
  return ties;
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

Sample parse_sample(std::istream& in, const std::string& source) {
  std::vector<double> values;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (!view.empty() && view.back() == ',') view = trim(view.substr(0, view.size() - 1));
    if (view.empty()) continue;
    // from_chars rejects a leading '+'
    if (view.front() == '+') view.remove_prefix(1);
    double value = 0.0;
    const auto res = std::from_chars(view.data(), view.data() + view.size(), value);
    if (res.ec != std::errc{} || res.ptr != view.data() + view.size()) {
      throw DataError(source + ":" + std::to_string(line_number) +
                      ": cannot parse '" + std::string(view) + "' as a real");
    }
    if (!std::isfinite(value)) {
      throw DataError(source + ":" + std::to_string(line_number) +
                      ": non-finite value '" + std::string(view) + "'");
    }
    values.push_back(value);
  }
  if (values.empty()) {
    throw DataError(source + ": no observations");
  }
  return Sample(std::move(values), source);
}

Sample read_sample(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError(path.string() + ": cannot open for reading");
  }
  return parse_sample(in, path.string());
}

}  // namespace cvxdiv
