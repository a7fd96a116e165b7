#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cvxdiv/statistics.hpp"

namespace cvxdiv {

/// How null replicates are drawn. `uniform` relies on the statistic being
/// distribution-free under H0; `permutation` reshuffles the pooled data and
/// is the fallback for tied data.
enum class NullMode { uniform, permutation };

std::string_view to_string(NullMode mode);
NullMode parse_null_mode(std::string_view text);
std::string_view to_string(CdfConvention convention);
CdfConvention parse_cdf_convention(std::string_view text);

struct NullTable {
  StatisticKind kind = StatisticKind::two_sample;
  std::string generator_name;
  CdfConvention convention = CdfConvention::right_continuous;
  NullMode mode = NullMode::uniform;
  std::vector<std::size_t> sizes;
  std::vector<double> weights;     ///< k_sample only
  std::uint64_t seed = 0;
  std::vector<double> replicates;  ///< sorted nondecreasing

  std::size_t size() const { return replicates.size(); }
};

struct SimulationOptions {
  /// OpenMP threads; 0 uses the runtime default. Never affects results.
  int workers = 0;
  /// Strictly increasing map applied to every uniform draw before the
  /// statistic is computed. Unset means identity.
  std::function<double(double)> transform;
};

/// B replicates of the statistic on independent standard-uniform samples of
/// the given sizes. Replicate r draws from Stream(seed, r), sample by sample
/// in order, so the sorted table depends only on (spec, sizes, B, seed).
NullTable simulate_null(const StatisticSpec& spec,
                        std::span<const std::size_t> sizes, std::size_t B,
                        std::uint64_t seed, const SimulationOptions& options = {});

/// Permutation null: replicate r shuffles the pooled observations with
/// Stream(seed, r) and splits them back into groups of the original sizes.
NullTable simulate_permutation_null(const StatisticSpec& spec,
                                    std::span<const Sample> data,
                                    std::size_t B, std::uint64_t seed,
                                    int workers = 0);

namespace reference {

/// Single-threaded loop over the same per-replicate kernel; kept to check
/// and benchmark the parallel path.
NullTable simulate_null(const StatisticSpec& spec,
                        std::span<const std::size_t> sizes, std::size_t B,
                        std::uint64_t seed,
                        const std::function<double(double)>& transform = {});

}  // namespace reference

/// Statistic of replicate `index`; the unit of work shared by every path.
double null_replicate(const StatisticSpec& spec,
                      std::span<const std::size_t> sizes, std::uint64_t seed,
                      std::uint64_t index,
                      const std::function<double(double)>& transform = {});

/// Add-one upper-tail Monte Carlo p-value (1 + #{t >= observed}) / (B + 1).
double p_value(const NullTable& table, double observed);

struct CriticalValue {
  double alpha = 0.0;
  double value = 0.0;
  std::size_t rank = 0;  ///< 1-based order statistic used
  bool clamped = false;  ///< table too small for this level
};

/// Order statistic of rank ceil((1 - alpha)(B + 1)) clamped to [1, B].
CriticalValue critical_value(const NullTable& table, double alpha);

struct TestOptions {
  std::size_t replicates = 9999;
  std::uint64_t seed = 0;
  std::vector<double> levels{0.05};
  NullMode mode = NullMode::uniform;
  int workers = 0;
};

struct TestReport {
  StatisticValue statistic;
  double p_value = 1.0;
  std::vector<CriticalValue> critical_values;
  StatisticKind kind = StatisticKind::two_sample;
  NullMode mode = NullMode::uniform;
  CdfConvention convention = CdfConvention::right_continuous;
  std::vector<std::size_t> sizes;
  std::vector<double> weights;
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  bool characterization_guaranteed = true;
  std::vector<std::string> warnings;
};

/// Runs the test on `data`. `table`, when given, is used instead of a fresh
/// simulation (it must match the data sizes); callers use this for caching.
TestReport run_test(const StatisticSpec& spec, std::span<const Sample> data,
                    const TestOptions& options, const NullTable* table = nullptr);

/// Assembles the report from an observed statistic and its null table.
TestReport assemble_report(const StatisticSpec& spec, std::span<const Sample> data,
                           const NullTable& table,
                           std::span<const double> levels);

/// Alternative applied to the last sample of each power replicate; the other
/// samples stay standard uniform.
struct Alternative {
  enum class Kind { shift, scale, lehmann };
  Kind kind = Kind::shift;
  double parameter = 0.0;

  /// Maps a standard uniform draw to a draw from the alternative.
  double apply(double u) const;
  std::string to_string() const;
};

/// Parses `shift:<delta>`, `scale:<sigma>` (about 1/2), `lehmann:<k>` (CDF
/// u^k). Throws ConfigurationError.
Alternative parse_alternative(std::string_view text);

struct PowerEstimate {
  double alpha = 0.0;
  std::size_t rejections = 0;
  std::size_t trials = 0;
  double power = 0.0;
  double standard_error = 0.0;
};

struct PowerOptions {
  std::size_t null_replicates = 999;
  std::size_t power_replicates = 1000;
  std::uint64_t seed = 0;
  std::vector<double> levels{0.05};
  int workers = 0;
};

/// Rejection rate (p <= alpha against one shared null table) over
/// power_replicates data sets drawn under `alternative`.
std::vector<PowerEstimate> power_study(const StatisticSpec& spec,
                                       const Alternative& alternative,
                                       std::span<const std::size_t> sizes,
                                       const PowerOptions& options);

}  // namespace cvxdiv
