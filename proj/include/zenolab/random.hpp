#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

namespace zenolab {

/// Counter-based generator. Output n of a stream is a SplitMix64 finalizer
/// applied to key + n * golden_gamma, so any draw can be reproduced from
/// (key, n) alone and streams never share state.
///
/// Streams are derived from one scenario seed by name: `CounterRng(seed,
/// "estimate")`. Adding a new named stream leaves every existing one intact.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key) : key_(key) {}
  CounterRng(std::uint64_t seed, std::string_view stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();

  /// Independent child stream, e.g. one per Monte Carlo replica.
  CounterRng substream(std::uint64_t index) const;
  CounterRng substream(std::string_view name) const;

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// 64-bit FNV-1a; stable across platforms, used for stream names and
/// scenario hashes.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace zenolab
