#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvxdiv/nulldist.hpp"

namespace cvxdiv {

inline constexpr int kReportSchemaVersion = 1;

/// Fields of a report that come from the invocation, not the computation.
struct ReportContext {
  std::string command;
  std::string generator_spec;
  std::vector<std::string> inputs;
  bool deterministic = false;  ///< omit the timestamp
};

/// JSON test report; layout documented in docs/report-schema.md.
nlohmann::json report_to_json(const TestReport& report, const ReportContext& context);

/// Rebuilds the null table a uniform-mode report was computed from, using
/// only the generator spec, kind, convention, sizes, weights, B and seed
/// embedded in it.
NullTable regenerate_table(const nlohmann::json& report, int workers = 0);

nlohmann::json power_to_json(std::span<const PowerEstimate> estimates,
                             const Alternative& alternative,
                             const PowerOptions& options,
                             std::span<const std::size_t> sizes,
                             const ReportContext& context);

/// Columns: alternative,alpha,rejections,trials,power,standard_error.
void write_power_csv(std::ostream& out, std::span<const PowerEstimate> estimates,
                     const Alternative& alternative);

/// One-row CSV form of a test report.
void write_report_csv(std::ostream& out, const TestReport& report,
                      const ReportContext& context);

}  // namespace cvxdiv
