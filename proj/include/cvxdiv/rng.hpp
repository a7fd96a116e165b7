#pragma once

#include <cstdint>
#include <random>

namespace cvxdiv {

/// SplitMix64 finalizer; used only to derive well-separated seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `index` of the family rooted at `seed`.
///
/// Replicate r of a simulation always draws from stream r, whichever thread
/// runs it, which is what makes null tables independent of worker count.
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Per-replicate random stream with platform-independent uniform draws.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index)
      : engine_(stream_seed(seed, index)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cvxdiv
