#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ipm {

/// Portable seeded generator. The engine is std::mt19937_64 (its output
/// sequence is fixed by the standard); the transforms below are implemented
/// here because the std distributions are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent substream: the engine is seeded with SplitMix64(seed, stream).
  static Rng substream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, bound), unbiased.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via the Marsaglia polar method.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Derive a child seed from a parent and an ordered list of labels.
std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> labels);

}  // namespace ipm
