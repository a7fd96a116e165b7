// cvxdiv: distribution-free two-sample and k-sample tests built on convex
// generators, with Monte Carlo null calibration.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
// failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvxdiv/ecdf.hpp"
#include "cvxdiv/errors.hpp"
#include "cvxdiv/generators.hpp"
#include "cvxdiv/nulldist.hpp"
#include "cvxdiv/oracle.hpp"
#include "cvxdiv/report.hpp"
#include "cvxdiv/statistics.hpp"
#include "cvxdiv/table_io.hpp"

namespace {

using namespace cvxdiv;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct CommonOptions {
  std::size_t replicates = 9999;
  std::uint64_t seed = 0;
  std::vector<double> levels{0.05};
  std::string convention = "right-continuous";
  std::string format = "json";
  std::string mode = "uniform";
  int workers = 0;
  bool no_cache = false;
  std::string cache_dir;
  bool deterministic = false;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool with_mode) {
  cmd->add_option("-B,--B", o.replicates, "Monte Carlo null replicates")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "Seed of the null simulation");
  cmd->add_option("--levels", o.levels, "Significance levels")
      ->delimiter(',')
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--convention", o.convention, "ECDF convention")
      ->check(CLI::IsMember({"right-continuous", "mid"}));
  cmd->add_option("--format", o.format, "Report format")
      ->check(CLI::IsMember({"json", "csv"}));
  if (with_mode) {
    cmd->add_option("--mode", o.mode, "Null calibration mode")
        ->check(CLI::IsMember({"uniform", "permutation"}));
  }
  cmd->add_option("--workers", o.workers, "Threads for replicates (0 = all)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--no-cache", o.no_cache, "Do not read or write cached null tables");
  cmd->add_option("--cache-dir", o.cache_dir,
                  "Null-table cache directory (default $CVXDIV_CACHE_DIR)");
  cmd->add_flag("--deterministic", o.deterministic, "Omit the report timestamp");
}

std::vector<std::size_t> sizes_of(const std::vector<Sample>& samples) {
  std::vector<std::size_t> sizes;
  for (const auto& s : samples) sizes.push_back(s.size());
  return sizes;
}

void check_levels(const std::vector<double>& levels) {
  for (const double a : levels) {
    if (!(a > 0.0 && a < 1.0)) {
      throw ConfigurationError("level " + std::to_string(a) + " is outside (0, 1)");
    }
  }
}

int emit_test(const StatisticSpec& spec, const std::vector<Sample>& data,
              const CommonOptions& o, ReportContext context) {
  check_levels(o.levels);
  const NullMode mode = parse_null_mode(o.mode);
  std::optional<NullTable> cached;
  if (mode == NullMode::uniform && !o.no_cache) {
    const TableCache cache(o.cache_dir.empty() ? TableCache::default_directory()
                                               : std::filesystem::path(o.cache_dir));
    const auto sizes = sizes_of(data);
    cached = cache.get_or_simulate(spec, sizes, o.replicates, o.seed, o.workers);
  }
  TestOptions options;
  options.replicates = o.replicates;
  options.seed = o.seed;
  options.levels = o.levels;
  options.mode = mode;
  options.workers = o.workers;
  TestReport report = run_test(spec, data, options, cached ? &*cached : nullptr);

  const ValidationReport validation = validate_generator(spec.generator, 128);
  if (!validation.passed) {
    report.characterization_guaranteed = false;
    report.warnings.push_back("generator validation failed: " +
                              validation.first_violation);
  }
  context.deterministic = o.deterministic;
  if (o.format == "csv") {
    write_report_csv(std::cout, report, context);
  } else {
    std::cout << report_to_json(report, context).dump(2) << '\n';
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"Distribution-free convex-generator two-sample and k-sample tests"};
  app.set_version_flag("--version", std::string(CVXDIV_VERSION));
  app.require_subcommand(1);
  // --h names the generator, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.option_defaults()->always_capture_default();

  CommonOptions common;

  // test2
  std::string h_spec;
  std::string x_path;
  std::string y_path;
  auto* test2 = app.add_subcommand("test2", "Two-sample test from a convex generator h");
  test2->set_help_flag("--help", "Print this help message and exit");
  test2->add_option("--h", h_spec, "Generator spec, e.g. power:2")->required();
  test2->add_option("--x", x_path, "First sample (one value per line)")->required();
  test2->add_option("--y", y_path, "Second sample")->required();
  add_common(test2, common, true);

  // testk
  std::vector<std::string> inputs;
  std::vector<double> weights;
  auto* testk = app.add_subcommand("testk", "k-sample weighted test");
  testk->set_help_flag("--help", "Print this help message and exit");
  testk->add_option("--h", h_spec, "Generator spec")->required();
  testk->add_option("--input", inputs, "Sample files (repeat, k >= 2)")->required();
  testk->add_option("--weights", weights, "Weights p_1..p_k (default 1/k)")
      ->delimiter(',');
  add_common(testk, common, true);

  // tau
  std::string xi_spec = "expsq:1";
  auto* tau = app.add_subcommand("tau", "Two-sample test from a log-convex generator xi");
  tau->set_help_flag("--help", "Print this help message and exit");
  tau->add_option("--xi", xi_spec, "Log-convex generator spec")->capture_default_str();
  tau->add_option("--x", x_path, "First sample")->required();
  tau->add_option("--y", y_path, "Second sample")->required();
  add_common(tau, common, true);

  // null-table
  std::string kind_text = "two_sample";
  std::vector<std::size_t> sizes;
  std::string out_path;
  auto* null_table = app.add_subcommand("null-table", "Simulate and print a null table");
  null_table->set_help_flag("--help", "Print this help message and exit");
  null_table->add_option("--kind", kind_text, "two_sample, k_sample or tau")
      ->check(CLI::IsMember({"two_sample", "k_sample", "tau"}));
  null_table->add_option("--h", h_spec, "Generator spec")->required();
  null_table->add_option("--sizes", sizes, "Sample sizes, e.g. 20,20")
      ->delimiter(',')
      ->required();
  null_table->add_option("--weights", weights, "k_sample weights")->delimiter(',');
  null_table->add_option("--out", out_path, "Also write the binary table here");
  add_common(null_table, common, false);

  // power
  std::string alternative_text;
  std::size_t b_power = 1000;
  auto* power = app.add_subcommand("power", "Monte Carlo power study");
  power->set_help_flag("--help", "Print this help message and exit");
  power->add_option("--kind", kind_text, "two_sample, k_sample or tau")
      ->check(CLI::IsMember({"two_sample", "k_sample", "tau"}));
  power->add_option("--h", h_spec, "Generator spec")->required();
  power->add_option("--alternative", alternative_text,
                    "shift:<delta>, scale:<sigma> or lehmann:<k>")
      ->required();
  power->add_option("--sizes", sizes, "Sample sizes")->delimiter(',')->required();
  power->add_option("--weights", weights, "k_sample weights")->delimiter(',');
  power->add_option("--B-power", b_power, "Data sets drawn under the alternative")
      ->check(CLI::PositiveNumber);
  add_common(power, common, false);

  // verify
  std::string battery_csv;
  std::uint64_t verify_seed = 20240601;
  auto* verify = app.add_subcommand("verify", "Run the oracle verification battery");
  verify->set_help_flag("--help", "Print this help message and exit");
  verify->add_option("--csv", battery_csv, "Also write the battery as CSV");
  verify->add_option("--seed", verify_seed, "Seed for the Monte Carlo cases");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const auto convention = parse_cdf_convention(common.convention);

  if (*test2) {
    StatisticSpec spec;
    spec.kind = StatisticKind::two_sample;
    spec.generator = parse_convex_generator(h_spec);
    spec.convention = convention;
    const std::vector<Sample> data{read_sample(x_path), read_sample(y_path)};
    return emit_test(spec, data, common, {"test2", h_spec, {x_path, y_path}, false});
  }
  if (*testk) {
    if (inputs.size() < 2) {
      throw ConfigurationError("testk requires at least two samples");
    }
    StatisticSpec spec;
    spec.kind = StatisticKind::k_sample;
    spec.generator = parse_convex_generator(h_spec);
    spec.convention = convention;
    if (!weights.empty()) {
      if (weights.size() != inputs.size()) {
        throw ConfigurationError("--weights has " + std::to_string(weights.size()) +
                                 " entries for " + std::to_string(inputs.size()) +
                                 " samples");
      }
      spec.weights = WeightVector(weights);
    }
    std::vector<Sample> data;
    for (const auto& path : inputs) data.push_back(read_sample(path));
    return emit_test(spec, data, common, {"testk", h_spec, inputs, false});
  }
  if (*tau) {
    StatisticSpec spec;
    spec.kind = StatisticKind::tau;
    spec.generator = parse_log_convex_generator(xi_spec);
    spec.convention = convention;
    const std::vector<Sample> data{read_sample(x_path), read_sample(y_path)};
    return emit_test(spec, data, common, {"tau", xi_spec, {x_path, y_path}, false});
  }

  if (*null_table || *power) {
    StatisticSpec spec;
    spec.kind = parse_statistic_kind(kind_text);
    spec.generator = parse_generator(h_spec);
    spec.convention = convention;
    if (!weights.empty()) spec.weights = WeightVector(weights);
    spec.check(sizes.size());

    if (*null_table) {
      NullTable table;
      if (common.no_cache) {
        table = simulate_null(spec, sizes, common.replicates, common.seed,
                              {common.workers, {}});
      } else {
        const TableCache cache(common.cache_dir.empty()
                                   ? TableCache::default_directory()
                                   : std::filesystem::path(common.cache_dir));
        table = cache.get_or_simulate(spec, sizes, common.replicates, common.seed,
                                      common.workers);
      }
      if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError(out_path + ": cannot open for writing");
        write_table_binary(out, table);
      }
      if (common.format == "json") {
        nlohmann::json j;
        j["schema"] = "cvxdiv.null_table";
        j["schema_version"] = kTableFormatVersion;
        j["kind"] = std::string(to_string(table.kind));
        j["generator"] = table.generator_name;
        j["convention"] = std::string(to_string(table.convention));
        j["sizes"] = table.sizes;
        j["weights"] = table.weights;
        j["B"] = table.size();
        j["seed"] = table.seed;
        j["replicates"] = table.replicates;
        std::cout << j.dump(2) << '\n';
      } else {
        write_table_csv(std::cout, table);
      }
      return kExitOk;
    }

    check_levels(common.levels);
    const Alternative alternative = parse_alternative(alternative_text);
    PowerOptions options;
    options.null_replicates = common.replicates;
    options.power_replicates = b_power;
    options.seed = common.seed;
    options.levels = common.levels;
    options.workers = common.workers;
    const auto estimates = power_study(spec, alternative, sizes, options);
    if (common.format == "csv") {
      write_power_csv(std::cout, estimates, alternative);
    } else {
      const ReportContext context{"power", h_spec, {}, common.deterministic};
      std::cout << power_to_json(estimates, alternative, options, sizes, context).dump(2)
                << '\n';
    }
    return kExitOk;
  }

  if (*verify) {
    const auto cases = oracle::run_battery(verify_seed);
    bool all = true;
    for (const auto& c : cases) {
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.id << " h=" << c.generator
                << " F=" << c.f << " G=" << c.g << " gap=" << c.gap
                << " (" << c.check << ", tol " << c.tolerance << ")\n";
      all = all && c.passed;
    }
    if (!battery_csv.empty()) {
      std::ofstream out(battery_csv);
      if (!out) throw DataError(battery_csv + ": cannot open for writing");
      oracle::write_battery_csv(out, cases);
    }
    std::cout << (all ? "all " : "not all ") << cases.size() << " cases passed\n";
    return all ? kExitOk : 1;
  }
  return kExitConfig;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const cvxdiv::ConfigurationError& e) {
    std::cerr << "cvxdiv: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const cvxdiv::InvalidParameter& e) {
    std::cerr << "cvxdiv: configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const cvxdiv::DataError& e) {
    std::cerr << "cvxdiv: data error: " << e.what() << '\n';
    return kExitData;
  } catch (const cvxdiv::NumericalFailure& e) {
    std::cerr << "cvxdiv: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "cvxdiv: error: " << e.what() << '\n';
    return kExitData;
  }
}
