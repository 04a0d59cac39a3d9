#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace geom {

/// Seeded random stream with platform-independent output. Draws are built
/// from raw mt19937_64 words so results do not depend on the standard
/// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), origin_(seed) {}

  /// Independent stream keyed by (seed, k0, k1, ...). Keys are mixed with
  /// splitmix64 so neighbouring keys give unrelated streams.
  static Rng stream(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

  /// Derive a child stream from this one without advancing it.
  Rng substream(std::uint64_t key) const;

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the Marsaglia polar method.
  double normal();

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
  std::uint64_t origin_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace geom
