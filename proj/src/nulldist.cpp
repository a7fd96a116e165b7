#include "cvxdiv/nulldist.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>

#include <omp.h>

#include "cvxdiv/errors.hpp"
#include "cvxdiv/rng.hpp"

namespace cvxdiv {

std::string_view to_string(NullMode mode) {
  return mode == NullMode::uniform ? "uniform" : "permutation";
}

NullMode parse_null_mode(std::string_view text) {
  if (text == "uniform") return NullMode::uniform;
  if (text == "permutation") return NullMode::permutation;
  throw ConfigurationError("unknown null mode '" + std::string(text) + "'");
}

std::string_view to_string(CdfConvention convention) {
  return convention == CdfConvention::right_continuous ? "right-continuous"
                                                       : "mid";
}

CdfConvention parse_cdf_convention(std::string_view text) {
  if (text == "right-continuous") return CdfConvention::right_continuous;
  if (text == "mid") return CdfConvention::mid;
  throw ConfigurationError("unknown CDF convention '" + std::string(text) + "'");
}

namespace {

void check_sizes(std::span<const std::size_t> sizes, std::size_t B) {
  if (B == 0) throw InvalidParameter("null simulation needs B >= 1");
  if (sizes.empty()) throw InvalidParameter("null simulation needs sample sizes");
  for (const auto n : sizes) {
    if (n == 0) throw InvalidParameter("sample sizes must be >= 1");
  }
}

std::vector<double> weights_of(const StatisticSpec& spec, std::size_t k) {
  if (spec.kind != StatisticKind::k_sample) return {};
  const WeightVector w = spec.weights ? *spec.weights : WeightVector::uniform(k);
  return {w.weights().begin(), w.weights().end()};
}

NullTable empty_table(const StatisticSpec& spec,
                      std::span<const std::size_t> sizes, std::uint64_t seed,
                      NullMode mode) {
  NullTable table;
  table.kind = spec.kind;
  table.generator_name = generator_name(spec.generator);
  table.convention = spec.convention;
  table.mode = mode;
  table.sizes.assign(sizes.begin(), sizes.end());
  table.weights = weights_of(spec, sizes.size());
  table.seed = seed;
  return table;
}

// Fills out[i] = f(i) for i in [0, out.size()) on `workers` OpenMP threads.
// Each slot is written by exactly one iteration, so the result does not
// depend on scheduling.
template <class F>
void parallel_fill(std::vector<double>& out, int workers, F&& f) {
  const auto n = static_cast<std::int64_t>(out.size());
  const int threads = workers > 0 ? workers : omp_get_max_threads();
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for num_threads(threads) schedule(dynamic, 64)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = f(static_cast<std::uint64_t>(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

std::vector<Sample> draw_uniform_samples(std::span<const std::size_t> sizes,
                                         Stream& stream,
                                         const std::function<double(double)>& transform,
                                         const Alternative* alternative = nullptr) {
  std::vector<Sample> samples;
  samples.reserve(sizes.size());
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    std::vector<double> values(sizes[s]);
    const bool shifted = alternative != nullptr && s + 1 == sizes.size();
    for (auto& v : values) {
      v = stream.uniform();
      if (shifted) v = alternative->apply(v);
      if (transform) v = transform(v);
    }
    samples.emplace_back(std::move(values));
  }
  return samples;
}

}  // namespace

double null_replicate(const StatisticSpec& spec,
                      std::span<const std::size_t> sizes, std::uint64_t seed,
                      std::uint64_t index,
                      const std::function<double(double)>& transform) {
  Stream stream(seed, index);
  const auto samples = draw_uniform_samples(sizes, stream, transform);
  return spec.evaluate(samples).value;
}

NullTable simulate_null(const StatisticSpec& spec,
                        std::span<const std::size_t> sizes, std::size_t B,
                        std::uint64_t seed, const SimulationOptions& options) {
  check_sizes(sizes, B);
  spec.check(sizes.size());
  NullTable table = empty_table(spec, sizes, seed, NullMode::uniform);
  table.replicates.resize(B);
  parallel_fill(table.replicates, options.workers, [&](std::uint64_t r) {
    return null_replicate(spec, sizes, seed, r, options.transform);
  });
  std::sort(table.replicates.begin(), table.replicates.end());
  return table;
}

NullTable simulate_permutation_null(const StatisticSpec& spec,
                                    std::span<const Sample> data,
                                    std::size_t B, std::uint64_t seed,
                                    int workers) {
  std::vector<std::size_t> sizes;
  std::vector<double> pooled;
  for (const auto& s : data) {
    sizes.push_back(s.size());
    pooled.insert(pooled.end(), s.values().begin(), s.values().end());
  }
  check_sizes(sizes, B);
  spec.check(sizes.size());
  NullTable table = empty_table(spec, sizes, seed, NullMode::permutation);
  table.replicates.resize(B);
  parallel_fill(table.replicates, workers, [&](std::uint64_t r) {
    Stream stream(seed, r);
    std::vector<double> shuffled = pooled;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[stream.below(i)]);
    }
    std::vector<Sample> groups;
    groups.reserve(sizes.size());
    auto it = shuffled.begin();
    for (const auto n : sizes) {
      groups.emplace_back(std::vector<double>(it, it + static_cast<std::ptrdiff_t>(n)));
      it += static_cast<std::ptrdiff_t>(n);
    }
    return spec.evaluate(groups).value;
  });
  std::sort(table.replicates.begin(), table.replicates.end());
  return table;
}

namespace reference {

NullTable simulate_null(const StatisticSpec& spec,
                        std::span<const std::size_t> sizes, std::size_t B,
                        std::uint64_t seed,
                        const std::function<double(double)>& transform) {
  check_sizes(sizes, B);
  spec.check(sizes.size());
  NullTable table = empty_table(spec, sizes, seed, NullMode::uniform);
  table.replicates.reserve(B);
  for (std::size_t r = 0; r < B; ++r) {
    table.replicates.push_back(null_replicate(spec, sizes, seed, r, transform));
  }
  std::sort(table.replicates.begin(), table.replicates.end());
  return table;
}

}  // namespace reference

double p_value(const NullTable& table, double observed) {
  if (table.replicates.empty()) throw InvalidParameter("empty null table");
  const auto first_ge = std::lower_bound(table.replicates.begin(),
                                         table.replicates.end(), observed);
  const auto at_least =
      static_cast<double>(table.replicates.end() - first_ge);
  return (1.0 + at_least) / (static_cast<double>(table.size()) + 1.0);
}

CriticalValue critical_value(const NullTable& table, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidParameter("level alpha must lie in (0, 1)");
  }
  if (table.replicates.empty()) throw InvalidParameter("empty null table");
  const auto B = static_cast<double>(table.size());
  // The 1e-9 slack keeps e.g. 0.95 * 100 from rounding up to rank 96.
  const double raw = std::ceil((1.0 - alpha) * (B + 1.0) - 1e-9);
  CriticalValue cv;
  cv.alpha = alpha;
  cv.clamped = raw < 1.0 || raw > B;
  cv.rank = static_cast<std::size_t>(std::clamp(raw, 1.0, B));
  cv.value = table.replicates[cv.rank - 1];
  return cv;
}

TestReport assemble_report(const StatisticSpec& spec, std::span<const Sample> data,
                           const NullTable& table,
                           std::span<const double> levels) {
  TestReport report;
  report.statistic = spec.evaluate(data);
  report.p_value = p_value(table, report.statistic.value);
  report.kind = spec.kind;
  report.mode = table.mode;
  report.convention = spec.convention;
  report.sizes = table.sizes;
  report.weights = table.weights;
  report.replicates = table.size();
  report.seed = table.seed;
  report.characterization_guaranteed = std::visit(
      [](const auto& g) { return g.characterization_guaranteed(); },
      spec.generator);

  for (const double alpha : levels) {
    report.critical_values.push_back(critical_value(table, alpha));
    if (report.critical_values.back().clamped) {
      std::ostringstream msg;
      msg << "null table too small for level " << alpha << " (B=" << table.size()
          << "); critical value clamped";
      report.warnings.push_back(msg.str());
    }
  }
  if (report.statistic.tie_count > 0) {
    report.warnings.push_back(
        std::to_string(report.statistic.tie_count) +
        " cross-sample ties observed; the continuous-distribution assumption "
        "is violated" +
        (table.mode == NullMode::uniform ? " (consider --mode permutation)" : ""));
  }
  if (!report.characterization_guaranteed) {
    report.warnings.push_back(
        "characterization not guaranteed: generator " +
        report.statistic.generator_name + " is not validated as strict");
  }
  return report;
}

TestReport run_test(const StatisticSpec& spec, std::span<const Sample> data,
                    const TestOptions& options, const NullTable* table) {
  spec.check(data.size());
  std::vector<std::size_t> sizes;
  for (const auto& s : data) sizes.push_back(s.size());
  if (table != nullptr) {
    if (table->sizes != sizes || table->kind != spec.kind) {
      throw InvalidParameter("supplied null table does not match the data");
    }
    return assemble_report(spec, data, *table, options.levels);
  }
  const NullTable fresh =
      options.mode == NullMode::uniform
          ? simulate_null(spec, sizes, options.replicates, options.seed,
                          {options.workers, {}})
          : simulate_permutation_null(spec, data, options.replicates,
                                      options.seed, options.workers);
  return assemble_report(spec, data, fresh, options.levels);
}

double Alternative::apply(double u) const {
  switch (kind) {
    case Kind::shift: return u + parameter;
    case Kind::scale: return 0.5 + parameter * (u - 0.5);
    case Kind::lehmann: return std::pow(u, 1.0 / parameter);
  }
  return u;
}

std::string Alternative::to_string() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind) {
    case Kind::shift: out << "shift:"; break;
    case Kind::scale: out << "scale:"; break;
    case Kind::lehmann: out << "lehmann:"; break;
  }
  out << parameter;
  return out.str();
}

Alternative parse_alternative(std::string_view text) {
  const auto colon = text.find(':');
  const auto bad = [&](const std::string& why) {
    return ConfigurationError("bad alternative '" + std::string(text) + "': " + why);
  };
  if (colon == std::string_view::npos) throw bad("expected <kind>:<parameter>");
  const auto family = text.substr(0, colon);
  const auto number = text.substr(colon + 1);
  double value = 0.0;
  const auto res = std::from_chars(number.data(), number.data() + number.size(), value);
  if (res.ec != std::errc{} || res.ptr != number.data() + number.size() ||
      !std::isfinite(value)) {
    throw bad("cannot parse parameter '" + std::string(number) + "'");
  }
  Alternative alt;
  alt.parameter = value;
  if (family == "shift") {
    alt.kind = Alternative::Kind::shift;
  } else if (family == "scale") {
    alt.kind = Alternative::Kind::scale;
    if (!(value > 0.0)) throw bad("scale must be > 0");
  } else if (family == "lehmann") {
    alt.kind = Alternative::Kind::lehmann;
    if (!(value > 0.0)) throw bad("Lehmann exponent must be > 0");
  } else {
    throw bad("unknown alternative '" + std::string(family) + "'");
  }
  return alt;
}

std::vector<PowerEstimate> power_study(const StatisticSpec& spec,
                                       const Alternative& alternative,
                                       std::span<const std::size_t> sizes,
                                       const PowerOptions& options) {
  if (options.power_replicates == 0) {
    throw InvalidParameter("power study needs at least one power replicate");
  }
  for (const double alpha : options.levels) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw InvalidParameter("level alpha must lie in (0, 1)");
    }
  }
  const NullTable table = simulate_null(spec, sizes, options.null_replicates,
                                        options.seed, {options.workers, {}});
  // Data sets come from a stream family disjoint from the null table's.
  const std::uint64_t data_seed = mix64(options.seed ^ 0x706f776572ULL);
  std::vector<double> p_values(options.power_replicates);
  parallel_fill(p_values, options.workers, [&](std::uint64_t r) {
    Stream stream(data_seed, r);
    const auto samples = draw_uniform_samples(sizes, stream, {}, &alternative);
    return p_value(table, spec.evaluate(samples).value);
  });

  std::vector<PowerEstimate> out;
  for (const double alpha : options.levels) {
    PowerEstimate est;
    est.alpha = alpha;
    est.trials = p_values.size();
    est.rejections = static_cast<std::size_t>(
        std::count_if(p_values.begin(), p_values.end(),
                      [alpha](double p) { return p <= alpha; }));
    est.power = static_cast<double>(est.rejections) / static_cast<double>(est.trials);
    est.standard_error =
        std::sqrt(est.power * (1.0 - est.power) / static_cast<double>(est.trials));
    out.push_back(est);
  }
  return out;
}

}  // namespace cvxdiv
