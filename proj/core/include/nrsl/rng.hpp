#pragma once

#include <cstdint>
#include <random>

namespace nrsl {

using UeId = std::uint32_t;

enum class StreamPurpose : std::uint8_t {
  Offset = 1,
  Selection = 2,
  Slrrc = 3,
  Keep = 4,
  Shadowing = 5,
};

/// Seed for one isolated stream, mixed from (drop seed, UE, purpose) with
/// SplitMix64 so that no stream depends on how many draws another consumed.
std::uint64_t derive_seed(std::uint64_t drop_seed, std::uint64_t ue, StreamPurpose purpose);

/// mt19937_64 with distribution code written out by hand: the standard
/// distributions are implementation-defined, which would break bit-exact
/// traces across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t drop_seed, UeId ue, StreamPurpose purpose)
      : Rng(derive_seed(drop_seed, ue, purpose)) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  bool bernoulli(double p) { return uniform01() < p; }
  /// Standard normal via Box-Muller (no cached second value).
  double normal();

 private:
  std::mt19937_64 engine_;
};

}  // namespace nrsl
