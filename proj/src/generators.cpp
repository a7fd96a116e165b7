#include "cvxdiv/generators.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <memory>
#include <sstream>

#include "cvxdiv/errors.hpp"
#include "cvxdiv/quadrature.hpp"

namespace cvxdiv {

ConvexGenerator make_convex(std::string name, ConvexGenerator::Function eval,
                            double integral, bool guaranteed) {
  return ConvexGenerator(std::move(name), std::move(eval), integral,
                         guaranteed);
}

LogConvexGenerator make_log_convex(std::string name,
                                   LogConvexGenerator::Function eval,
                                   LogConvexGenerator::Function antiderivative,
                                   double integral_sq, bool guaranteed) {
  return LogConvexGenerator(std::move(name), std::move(eval),
                            std::move(antiderivative), integral_sq,
                            guaranteed);
}

namespace {

std::string format_number(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

constexpr double kGeneratorQuadTolerance = 1e-10;
constexpr double kStrictnessTolerance = 1e-12;

}  // namespace

ConvexGenerator ConvexGenerator::unchecked(std::string name, Function eval,
                                           double integral_0_1) {
  return make_convex(std::move(name), std::move(eval), integral_0_1, false);
}

ConvexGenerator ConvexGenerator::negated() const {
  Function inner = eval_;
  return make_convex("neg:" + name_,
                     [inner](double u) { return -inner(u); }, -integral_,
                     false);
}

LogConvexGenerator LogConvexGenerator::unchecked(std::string name,
                                                 Function eval,
                                                 Function antiderivative,
                                                 double integral_sq_0_1) {
  return make_log_convex(std::move(name), std::move(eval),
                         std::move(antiderivative), integral_sq_0_1, false);
}

ConvexGenerator power_generator(int m) {
  if (m < 2) {
    throw InvalidParameter("power generator needs m >= 2, got " +
                           std::to_string(m));
  }
  return make_convex(
      "power:" + std::to_string(m),
      [m](double u) {
        // Repeated multiplication; std::pow is not guaranteed exact for
        // small integer exponents.
        double r = u;
        for (int k = 1; k < m; ++k) r *= u;
        return r;
      },
      1.0 / (m + 1), true);
}

ConvexGenerator polynomial_generator(std::span<const double> coeffs) {
  if (coeffs.empty()) {
    throw InvalidParameter("polynomial generator needs at least one coefficient");
  }
  bool has_curvature = false;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    if (!std::isfinite(coeffs[k]) || coeffs[k] < 0.0) {
      throw InvalidParameter("polynomial coefficient c_" +
                             std::to_string(k + 1) + " = " +
                             format_number(coeffs[k]) + " must be >= 0");
    }
    if (k >= 1 && coeffs[k] > 0.0) has_curvature = true;
  }
  if (!has_curvature) {
    throw NotStrictlyConvex(
        "polynomial generator needs some c_k > 0 with k >= 2");
  }
  std::vector<double> c(coeffs.begin(), coeffs.end());
  std::string name = "poly:";
  double integral = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (k) name += ',';
    name += format_number(c[k]);
    integral += c[k] / static_cast<double>(k + 2);
  }
  return make_convex(
      std::move(name),
      [c = std::move(c)](double u) {
        double acc = 0.0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
        return acc * u;
      },
      integral, true);
}

ConvexGenerator bernstein_generator(const ConvexGenerator& h, int m) {
  if (m < 2) {
    throw InvalidParameter("bernstein generator needs m >= 2, got " +
                           std::to_string(m));
  }
  std::vector<double> control(static_cast<std::size_t>(m) + 1, 0.0);
  double integral = 0.0;
  for (int k = 1; k <= m; ++k) {
    const double value = h(static_cast<double>(k) / m);
    if (!(value >= 0.0)) {
      throw InvalidParameter("bernstein generator needs h >= 0; h(" +
                             std::to_string(k) + "/" + std::to_string(m) +
                             ") = " + format_number(value));
    }
    control[static_cast<std::size_t>(k)] = value;
    integral += value;
  }
  integral /= (m + 1);
  // control[0] stays 0: the k = 0 basis term is dropped.
  return make_convex(
      "bernstein:" + h.name() + ":" + std::to_string(m),
      [control = std::move(control)](double u) {
        // de Casteljau
        thread_local std::vector<double> b;
        b.assign(control.begin(), control.end());
        const double v = 1.0 - u;
        for (std::size_t r = 1; r < b.size(); ++r) {
          for (std::size_t i = 0; i + r < b.size(); ++i) {
            b[i] = v * b[i] + u * b[i + 1];
          }
        }
        return b[0];
      },
      integral, h.characterization_guaranteed());
}

LogConvexGenerator exp_sq_generator(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidParameter("expsq generator needs alpha > 0, got " +
                           format_number(alpha));
  }
  auto xi = [alpha](double u) { return std::exp(alpha * u * u); };
  auto antiderivative = [xi](double u) {
    return integrate_or_throw(xi, 0.0, u, {kGeneratorQuadTolerance, 2'000'000});
  };
  const double integral_sq = integrate_or_throw(
      [xi](double u) {
        const double v = xi(u);
        return v * v;
      },
      0.0, 1.0, {kGeneratorQuadTolerance, 2'000'000});
  return make_log_convex("expsq:" + format_number(alpha), xi, antiderivative,
                         integral_sq, true);
}

namespace {

std::vector<double> probe_grid(int grid_size) {
  std::vector<double> grid(static_cast<std::size_t>(grid_size) + 1);
  for (int i = 0; i <= grid_size; ++i) {
    grid[static_cast<std::size_t>(i)] = static_cast<double>(i) / grid_size;
  }
  return grid;
}

ValidationReport fail(ValidationReport report, const std::string& what) {
  report.passed = false;
  report.first_violation = what;
  return report;
}

std::string at(double u) { return format_number(u); }

}  // namespace

ValidationReport validate_generator(const ConvexGenerator& h, int grid_size) {
  if (grid_size < 3) {
    throw InvalidParameter("validation grid_size must be >= 3");
  }
  ValidationReport report;
  const auto grid = probe_grid(grid_size);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = h(grid[i]);

  ++report.probes;
  if (!(std::abs(values[0]) <= kStrictnessTolerance)) {
    return fail(report, "h(0) = " + at(values[0]) + " != 0");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      ++report.probes;
      const double mid = h(0.5 * (grid[i] + grid[j]));
      const double chord = 0.5 * (values[i] + values[j]);
      const double scale = std::max(std::abs(values[i]), std::abs(values[j]));
      if (!(chord - mid > kStrictnessTolerance * scale) || !(chord > mid)) {
        return fail(report, "midpoint convexity not strict at u=" +
                                at(grid[i]) + ", v=" + at(grid[j]) +
                                ": h(mid)=" + at(mid) +
                                ", chord=" + at(chord));
      }
    }
  }
  ++report.probes;
  const auto quad = integrate(h.eval_function(), 0.0, 1.0, {1e-11, 2'000'000});
  if (!quad.converged ||
      std::abs(quad.value - h.integral_0_1()) > kGeneratorQuadTolerance) {
    return fail(report, "integral_0_1 = " + at(h.integral_0_1()) +
                            " disagrees with quadrature " + at(quad.value));
  }
  return report;
}

ValidationReport validate_generator(const LogConvexGenerator& xi,
                                    int grid_size) {
  if (grid_size < 3) {
    throw InvalidParameter("validation grid_size must be >= 3");
  }
  ValidationReport report;
  const auto grid = probe_grid(grid_size);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = xi(grid[i]);
    ++report.probes;
    if (!(values[i] > 0.0)) {
      return fail(report, "xi(" + at(grid[i]) + ") = " + at(values[i]) +
                              " is not positive");
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      ++report.probes;
      const double mid = xi(0.5 * (grid[i] + grid[j]));
      const double product = values[i] * values[j];
      const double mid_sq = mid * mid;
      if (!(product - mid_sq > kStrictnessTolerance * product)) {
        return fail(report, "midpoint log-convexity not strict at u=" +
                                at(grid[i]) + ", v=" + at(grid[j]) +
                                ": xi(mid)^2=" + at(mid_sq) +
                                ", xi(u)xi(v)=" + at(product));
      }
    }
  }
  const auto eval = xi.eval_function();
  double previous = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    ++report.probes;
    const double big_xi = xi.antiderivative(grid[i]);
    if (i == 0 && !(std::abs(big_xi) <= kStrictnessTolerance)) {
      return fail(report, "Xi(0) = " + at(big_xi) + " != 0");
    }
    if (big_xi < previous) {
      return fail(report, "Xi decreases at u=" + at(grid[i]));
    }
    previous = big_xi;
    const auto quad = integrate(eval, 0.0, grid[i], {1e-11, 2'000'000});
    if (!quad.converged || std::abs(quad.value - big_xi) > kGeneratorQuadTolerance) {
      return fail(report, "Xi(" + at(grid[i]) + ") = " + at(big_xi) +
                              " disagrees with quadrature " + at(quad.value));
    }
  }
  ++report.probes;
  const auto quad = integrate(
      [&xi](double u) {
        const double v = xi(u);
        return v * v;
      },
      0.0, 1.0, {1e-11, 2'000'000});
  if (!quad.converged ||
      std::abs(quad.value - xi.integral_sq_0_1()) > kGeneratorQuadTolerance) {
    return fail(report, "integral_sq_0_1 = " + at(xi.integral_sq_0_1()) +
                            " disagrees with quadrature " + at(quad.value));
  }
  return report;
}

ValidationReport validate_generator(const Generator& g, int grid_size) {
  return std::visit(
      [grid_size](const auto& gen) { return validate_generator(gen, grid_size); },
      g);
}

namespace {

[[noreturn]] void bad_spec(std::string_view token, std::string_view why) {
  throw ConfigurationError("bad generator spec '" + std::string(token) +
                           "': " + std::string(why));
}

int parse_int(std::string_view token, std::string_view whole) {
  int value = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    bad_spec(whole, "expected an integer, got '" + std::string(token) + "'");
  }
  return value;
}

double parse_real(std::string_view token, std::string_view whole) {
  double value = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) {
    bad_spec(whole, "expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

template <class F>
auto rethrow_as_config(std::string_view whole, F&& build) {
  try {
    return build();
  } catch (const InvalidParameter& e) {
    bad_spec(whole, e.what());
  }
}

}  // namespace

Generator parse_generator(std::string_view spec) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) {
    bad_spec(spec, "unknown generator '" + std::string(spec) + "'");
  }
  const std::string_view family = spec.substr(0, colon);
  const std::string_view rest = spec.substr(colon + 1);

  if (family == "power") {
    const int m = parse_int(rest, spec);
    return rethrow_as_config(spec, [m] { return Generator{power_generator(m)}; });
  }
  if (family == "poly") {
    std::vector<double> coeffs;
    std::string_view tail = rest;
    while (true) {
      const auto comma = tail.find(',');
      coeffs.push_back(parse_real(tail.substr(0, comma), spec));
      if (comma == std::string_view::npos) break;
      tail = tail.substr(comma + 1);
    }
    return rethrow_as_config(
        spec, [&coeffs] { return Generator{polynomial_generator(coeffs)}; });
  }
  if (family == "bernstein") {
    const auto last = rest.rfind(':');
    if (last == std::string_view::npos) {
      bad_spec(spec, "expected bernstein:<inner-spec>:m");
    }
    const Generator inner = [&] {
      try {
        return parse_generator(rest.substr(0, last));
      } catch (const ConfigurationError& e) {
        bad_spec(spec, e.what());
      }
    }();
    const int m = parse_int(rest.substr(last + 1), spec);
    const auto* h = std::get_if<ConvexGenerator>(&inner);
    if (h == nullptr) {
      bad_spec(spec, "bernstein needs a convex inner generator");
    }
    return rethrow_as_config(
        spec, [h, m] { return Generator{bernstein_generator(*h, m)}; });
  }
  if (family == "expsq") {
    const double alpha = parse_real(rest, spec);
    return rethrow_as_config(
        spec, [alpha] { return Generator{exp_sq_generator(alpha)}; });
  }
  bad_spec(spec, "unknown generator family '" + std::string(family) + "'");
}

ConvexGenerator parse_convex_generator(std::string_view spec) {
  Generator g = parse_generator(spec);
  if (auto* h = std::get_if<ConvexGenerator>(&g)) return std::move(*h);
  bad_spec(spec, "expected a convex generator (power, poly, bernstein)");
}

LogConvexGenerator parse_log_convex_generator(std::string_view spec) {
  Generator g = parse_generator(spec);
  if (auto* xi = std::get_if<LogConvexGenerator>(&g)) return std::move(*xi);
  bad_spec(spec, "expected a log-convex generator (expsq)");
}

const std::string& generator_name(const Generator& g) {
  return std::visit([](const auto& gen) -> const std::string& { return gen.name(); },
                    g);
}

}  // namespace cvxdiv
