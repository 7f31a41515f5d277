#pragma once

#include <cstdint>
#include <limits>

namespace kszlab {

/// SplitMix64 output finalizer (Steele, Lea & Flood constants).
constexpr std::uint64_t splitmix_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// Word `counter` of the stream keyed by `key`: the SplitMix64 sequence
/// started from state finalize(key), read at position counter + 1. Any
/// word can be computed without generating the ones before it.
constexpr std::uint64_t counter_hash(std::uint64_t key, std::uint64_t counter) {
  return splitmix_finalize(splitmix_finalize(key) + (counter + 1) * kGoldenGamma);
}

/// Derived seed for sub-task `index` (restart, draw, trial) of `seed`.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix_finalize(seed ^ splitmix_finalize(index + kGoldenGamma));
}

/// UniformRandomBitGenerator over counter_hash, usable with <random>
/// distributions.
class CounterRng {
public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t start = 0)
      : key_(key), counter_(start) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return counter_hash(key_, counter_++); }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace kszlab
