#include "cvxdiv/report.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <ostream>

#include "cvxdiv/errors.hpp"

namespace cvxdiv {
namespace {

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void add_common(nlohmann::json& j, const ReportContext& context) {
  j["schema"] = "cvxdiv.report";
  j["schema_version"] = kReportSchemaVersion;
  j["software_version"] = CVXDIV_VERSION;
  j["command"] = context.command;
  j["generator"] = context.generator_spec;
  j["inputs"] = context.inputs;
  if (!context.deterministic) j["timestamp"] = utc_timestamp();
}

}  // namespace

nlohmann::json report_to_json(const TestReport& report, const ReportContext& context) {
  nlohmann::json j;
  add_common(j, context);
  j["kind"] = std::string(to_string(report.kind));
  j["convention"] = std::string(to_string(report.convention));
  j["statistic"] = {
      {"value", report.statistic.value},
      {"raw_functional", report.statistic.raw_functional},
      {"centering_constant", report.statistic.centering_constant},
      {"tie_count", report.statistic.tie_count},
      {"generator_name", report.statistic.generator_name},
  };
  j["p_value"] = report.p_value;
  auto cvs = nlohmann::json::array();
  for (const auto& cv : report.critical_values) {
    cvs.push_back({{"alpha", cv.alpha},
                   {"value", cv.value},
                   {"rank", cv.rank},
                   {"clamped", cv.clamped},
                   {"reject", report.p_value <= cv.alpha}});
  }
  j["critical_values"] = std::move(cvs);
  j["null_table"] = {
      {"mode", std::string(to_string(report.mode))},
      {"B", report.replicates},
      {"seed", report.seed},
      {"sizes", report.sizes},
      {"weights", report.weights},
  };
  j["characterization_guaranteed"] = report.characterization_guaranteed;
  j["warnings"] = report.warnings;
  return j;
}

NullTable regenerate_table(const nlohmann::json& report, int workers) {
  const auto& meta = report.at("null_table");
  if (meta.at("mode").get<std::string>() != "uniform") {
    throw ConfigurationError("only uniform-mode reports can be regenerated");
  }
  StatisticSpec spec;
  spec.kind = parse_statistic_kind(report.at("kind").get<std::string>());
  spec.generator = parse_generator(report.at("generator").get<std::string>());
  spec.convention = parse_cdf_convention(report.at("convention").get<std::string>());
  const auto weights = meta.at("weights").get<std::vector<double>>();
  if (!weights.empty()) spec.weights = WeightVector(weights);
  const auto sizes = meta.at("sizes").get<std::vector<std::size_t>>();
  return simulate_null(spec, sizes, meta.at("B").get<std::size_t>(),
                       meta.at("seed").get<std::uint64_t>(), {workers, {}});
}

nlohmann::json power_to_json(std::span<const PowerEstimate> estimates,
                             const Alternative& alternative,
                             const PowerOptions& options,
                             std::span<const std::size_t> sizes,
                             const ReportContext& context) {
  nlohmann::json j;
  add_common(j, context);
  j["alternative"] = alternative.to_string();
  j["sizes"] = std::vector<std::size_t>(sizes.begin(), sizes.end());
  j["B_null"] = options.null_replicates;
  j["B_power"] = options.power_replicates;
  j["seed"] = options.seed;
  auto rows = nlohmann::json::array();
  for (const auto& e : estimates) {
    rows.push_back({{"alpha", e.alpha},
                    {"rejections", e.rejections},
                    {"trials", e.trials},
                    {"power", e.power},
                    {"standard_error", e.standard_error}});
  }
  j["power"] = std::move(rows);
  return j;
}

void write_power_csv(std::ostream& out, std::span<const PowerEstimate> estimates,
                     const Alternative& alternative) {
  out << "alternative,alpha,rejections,trials,power,standard_error\n";
  char buf[128];
  for (const auto& e : estimates) {
    std::snprintf(buf, sizeof buf, ",%.17g,%zu,%zu,%.17g,%.17g\n", e.alpha,
                  e.rejections, e.trials, e.power, e.standard_error);
    out << alternative.to_string() << buf;
  }
}

void write_report_csv(std::ostream& out, const TestReport& report,
                      const ReportContext& context) {
  out << "command,generator,kind,statistic,raw_functional,centering_constant,"
         "tie_count,p_value,B,seed\n";
  char buf[160];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu,%.17g,%zu,%llu\n",
                report.statistic.value, report.statistic.raw_functional,
                report.statistic.centering_constant, report.statistic.tie_count,
                report.p_value, report.replicates,
                static_cast<unsigned long long>(report.seed));
  out << context.command << ',' << context.generator_spec << ','
      << to_string(report.kind) << ',' << buf;
}

}  // namespace cvxdiv
