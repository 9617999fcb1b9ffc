#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace autologit {

// Counter-based random stream. A stream is identified by a 64-bit key
// derived from the seed and a path of indices (replicate, time, epoch ...);
// draw k of a stream is a pure function of (key, k), so streams can be split
// and consumed in any order or on any thread with identical results.
// Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}
  RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) : RngStream(seed) {
    for (auto index : path) key_ = child_key(key_, index);
  }

  RngStream split(std::uint64_t index) const {
    RngStream child;
    child.key_ = child_key(key_, index);
    return child;
  }

  result_type operator()() { return mix(key_ + kGolden * (++counter_)); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const { return key_; }
  std::uint64_t position() const { return counter_; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  // SplitMix64 finaliser.
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  static constexpr std::uint64_t child_key(std::uint64_t key, std::uint64_t index) {
    return mix(key ^ mix(index * kGolden + 0x3c6ef372fe94f82bULL));
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace autologit
