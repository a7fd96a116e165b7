#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>

#include "cvxdiv/nulldist.hpp"

namespace cvxdiv {

/// Binary null-table format, version 1 (little-endian):
///
///   "CVXDNULL"            8-byte magic
///   u32 version           = 1
///   u32 kind, u32 mode, u32 convention
///   u64 seed
///   u32 len, bytes        generator name
///   u32 k, k x u64        sample sizes
///   u32 w, w x f64        weights (k_sample only)
///   u64 B, B x f64        sorted replicates
inline constexpr std::uint32_t kTableFormatVersion = 1;

void write_table_binary(std::ostream& out, const NullTable& table);
/// Throws DataError on a bad magic, version or truncated stream.
NullTable read_table_binary(std::istream& in);

/// Header comment lines with the metadata, then one replicate per line
/// printed with 17 significant digits.
void write_table_csv(std::ostream& out, const NullTable& table);

/// Hex FNV-1a digest of (format version, kind, generator, convention, sizes,
/// weights, B, seed). Uniform-mode tables only.
std::string table_cache_key(const StatisticSpec& spec,
                            std::span<const std::size_t> sizes, std::size_t B,
                            std::uint64_t seed);

/// Directory of cached uniform-mode null tables, one file per key.
class TableCache {
 public:
  explicit TableCache(std::filesystem::path directory)
      : directory_(std::move(directory)) {}

  /// $CVXDIV_CACHE_DIR if set, else $XDG_CACHE_HOME/cvxdiv, else
  /// ~/.cache/cvxdiv, else ./.cvxdiv-cache.
  static std::filesystem::path default_directory();

  std::optional<NullTable> load(const std::string& key) const;
  void store(const std::string& key, const NullTable& table) const;

  /// Returns the cached table or simulates and stores it.
  NullTable get_or_simulate(const StatisticSpec& spec,
                            std::span<const std::size_t> sizes, std::size_t B,
                            std::uint64_t seed, int workers) const;

  const std::filesystem::path& directory() const { return directory_; }

 private:
  std::filesystem::path path_for(const std::string& key) const;
  std::filesystem::path directory_;
};

}  // namespace cvxdiv
