#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace jau {

/// Mixes a 64-bit value (SplitMix64 finalizer).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Derives an independent substream seed from a master seed and a path of tags.
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path) noexcept;

/// Tags for the substreams drawn by the library. Every stochastic choice
/// starts from derive_seed(master, {tag, ...}).
enum class Stream : std::uint64_t {
  kInitDictionary = 1,
  kInstanceDictionary = 2,
  kInstanceCodes = 3,
  kNoise = 4,
  kPatches = 5,
  kTextures = 6,
  kRun = 7,
};

inline std::uint64_t derive_seed(std::uint64_t seed, Stream stream,
                                 std::initializer_list<std::uint64_t> rest = {}) noexcept {
  std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(stream)});
  return rest.size() ? derive_seed(s, rest) : s;
}

/// Platform-stable generator: std::mt19937_64 has a fully specified output
/// sequence; the distributions below are implemented here because the
/// standard library ones are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound), bound > 0; unbiased (rejection).
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace jau
