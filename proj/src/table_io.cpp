#include "cvxdiv/table_io.hpp"

#include <bit>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "cvxdiv/errors.hpp"

namespace cvxdiv {
namespace {

static_assert(std::endian::native == std::endian::little,
              "table format is written in native little-endian order");

constexpr char kMagic[8] = {'C', 'V', 'X', 'D', 'N', 'U', 'L', 'L'};

template <class T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <class T>
T get(std::istream& in) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof value)) {
    throw DataError("null table: truncated stream");
  }
  return value;
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

void write_table_binary(std::ostream& out, const NullTable& table) {
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kTableFormatVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(table.kind));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(table.mode));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(table.convention));
  put<std::uint64_t>(out, table.seed);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(table.generator_name.size()));
  out.write(table.generator_name.data(),
            static_cast<std::streamsize>(table.generator_name.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(table.sizes.size()));
  for (const auto n : table.sizes) put<std::uint64_t>(out, n);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(table.weights.size()));
  for (const double w : table.weights) put<double>(out, w);
  put<std::uint64_t>(out, table.replicates.size());
  out.write(reinterpret_cast<const char*>(table.replicates.data()),
            static_cast<std::streamsize>(table.replicates.size() * sizeof(double)));
}

NullTable read_table_binary(std::istream& in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0) {
    throw DataError("null table: bad magic");
  }
  const auto version = get<std::uint32_t>(in);
  if (version != kTableFormatVersion) {
    throw DataError("null table: unsupported format version " +
                    std::to_string(version));
  }
  NullTable table;
  const auto kind = get<std::uint32_t>(in);
  const auto mode = get<std::uint32_t>(in);
  const auto convention = get<std::uint32_t>(in);
  if (kind > 2 || mode > 1 || convention > 1) {
    throw DataError("null table: corrupt header");
  }
  table.kind = static_cast<StatisticKind>(kind);
  table.mode = static_cast<NullMode>(mode);
  table.convention = static_cast<CdfConvention>(convention);
  table.seed = get<std::uint64_t>(in);
  table.generator_name.resize(get<std::uint32_t>(in));
  if (!in.read(table.generator_name.data(),
               static_cast<std::streamsize>(table.generator_name.size()))) {
    throw DataError("null table: truncated stream");
  }
  table.sizes.resize(get<std::uint32_t>(in));
  for (auto& n : table.sizes) n = get<std::uint64_t>(in);
  table.weights.resize(get<std::uint32_t>(in));
  for (auto& w : table.weights) w = get<double>(in);
  const auto B = get<std::uint64_t>(in);
  table.replicates.resize(B);
  if (!in.read(reinterpret_cast<char*>(table.replicates.data()),
               static_cast<std::streamsize>(B * sizeof(double)))) {
    throw DataError("null table: truncated stream");
  }
  return table;
}

void write_table_csv(std::ostream& out, const NullTable& table) {
  out << "# cvxdiv null table v" << kTableFormatVersion << '\n'
      << "# kind=" << to_string(table.kind) << '\n'
      << "# generator=" << table.generator_name << '\n'
      << "# convention=" << to_string(table.convention) << '\n'
      << "# mode=" << to_string(table.mode) << '\n'
      << "# sizes=";
  for (std::size_t i = 0; i < table.sizes.size(); ++i) {
    out << (i ? "," : "") << table.sizes[i];
  }
  out << '\n';
  if (!table.weights.empty()) {
    out << "# weights=" << std::setprecision(17);
    for (std::size_t i = 0; i < table.weights.size(); ++i) {
      out << (i ? "," : "") << table.weights[i];
    }
    out << '\n';
  }
  out << "# B=" << table.size() << '\n'
      << "# seed=" << table.seed << '\n'
      << "statistic\n";
  char buf[32];
  for (const double v : table.replicates) {
    std::snprintf(buf, sizeof buf, "%.17g\n", v);
    out << buf;
  }
}

std::string table_cache_key(const StatisticSpec& spec,
                            std::span<const std::size_t> sizes, std::size_t B,
                            std::uint64_t seed) {
  std::ostringstream canon;
  canon << "v" << kTableFormatVersion << '|' << to_string(spec.kind) << '|'
        << generator_name(spec.generator) << '|' << to_string(spec.convention)
        << '|';
  for (const auto n : sizes) canon << n << ',';
  canon << '|';
  if (spec.kind == StatisticKind::k_sample) {
    const WeightVector w =
        spec.weights ? *spec.weights : WeightVector::uniform(sizes.size());
    char buf[32];
    for (const double p : w.weights()) {
      std::snprintf(buf, sizeof buf, "%a,", p);
      canon << buf;
    }
  }
  canon << '|' << B << '|' << seed;
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx",
                static_cast<unsigned long long>(fnv1a(canon.str())));
  return hex;
}

std::filesystem::path TableCache::default_directory() {
  if (const char* dir = std::getenv("CVXDIV_CACHE_DIR"); dir && *dir) return dir;
  if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) {
    return std::filesystem::path(xdg) / "cvxdiv";
  }
  if (const char* home = std::getenv("HOME"); home && *home) {
    return std::filesystem::path(home) / ".cache" / "cvxdiv";
  }
  return ".cvxdiv-cache";
}

std::filesystem::path TableCache::path_for(const std::string& key) const {
  return directory_ / (key + ".cvxnull");
}

std::optional<NullTable> TableCache::load(const std::string& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  try {
    return read_table_binary(in);
  } catch (const DataError&) {
    return std::nullopt;  // corrupt entries are regenerated
  }
}

void TableCache::store(const std::string& key, const NullTable& table) const {
  std::filesystem::create_directories(directory_);
  const auto final_path = path_for(key);
  auto tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write cache file " + tmp.string());
    write_table_binary(out, table);
  }
  std::filesystem::rename(tmp, final_path);
}

NullTable TableCache::get_or_simulate(const StatisticSpec& spec,
                                      std::span<const std::size_t> sizes,
                                      std::size_t B, std::uint64_t seed,
                                      int workers) const {
  const std::string key = table_cache_key(spec, sizes, B, seed);
  if (auto cached = load(key)) {
    const bool matches =
        cached->kind == spec.kind && cached->seed == seed &&
        cached->size() == B &&
        cached->generator_name == generator_name(spec.generator) &&
        std::equal(cached->sizes.begin(), cached->sizes.end(), sizes.begin(),
                   sizes.end());
    if (matches) return std::move(*cached);
  }
  NullTable table = simulate_null(spec, sizes, B, seed, {workers, {}});
  store(key, table);
  return table;
}

}  // namespace cvxdiv
