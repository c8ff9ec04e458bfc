#pragma once

#include <cstdint>
#include <limits>

namespace cbcast {

// Counter-based SplitMix64. Output i of key k is mix(k + (i+1)*0x9e3779b97f4a7c15),
// i.e. the (i+1)-th output of the reference SplitMix64 seeded with k.
class Counter64 {
public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t golden = 0x9e3779b97f4a7c15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr explicit Counter64(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

  // Independent stream for (seed, a, b).
  static constexpr Counter64 stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return Counter64(mix(seed ^ mix(a + golden * mix(b + 1))));
  }

  constexpr std::uint64_t at(std::uint64_t i) const { return mix(key_ + (i + 1) * golden); }
  constexpr std::uint64_t operator()() { return at(counter_++); }

  // 53-bit uniform on [0,1).
  constexpr double uniform() { return static_cast<double>((*this)() >> 11) * 0x1p-53; }
  constexpr double uniform_at(std::uint64_t i) const { return static_cast<double>(at(i) >> 11) * 0x1p-53; }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  constexpr std::uint64_t key() const { return key_; }
  constexpr std::uint64_t counter() const { return counter_; }

private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

} // namespace cbcast
