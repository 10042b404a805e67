#pragma once

#include <cstdint>

namespace fpplab {

// Counter-based seed derivation. Every random quantity in the library is a
// pure function of (key, counter) through these two functions, so results do
// not depend on scheduling or on the order in which edges are visited.
//
//   splitmix64(x) = finalize(x + 0x9E3779B97F4A7C15)
//   finalize(z):   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//                  z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//                  return z ^ (z >> 31)
//   mix64(a, b)  = splitmix64(a ^ splitmix64(b))
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(a ^ splitmix64(b));
}

// Top 53 bits of a draw, as an integer in [0, 2^53).
constexpr std::uint64_t mantissa53(std::uint64_t bits) noexcept { return bits >> 11; }

// Uniform in the open interval (0, 1): midpoint of the dyadic cell k * 2^-53.
constexpr double open_unit(std::uint64_t bits) noexcept {
  return (static_cast<double>(mantissa53(bits)) + 0.5) * 0x1.0p-53;
}

// A stream of independent draws for one (key) value; draw i is mix64(key, i).
class CounterStream {
 public:
  constexpr explicit CounterStream(std::uint64_t key) noexcept : key_(key) {}

  constexpr std::uint64_t next() noexcept { return mix64(key_, counter_++); }
  constexpr double uniform() noexcept { return open_unit(next()); }
  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) noexcept {
    const std::uint64_t limit = bound == 0 ? 0 : (~std::uint64_t{0} - (~std::uint64_t{0} % bound));
    for (;;) {
      const std::uint64_t x = next();
      if (x < limit) return x % bound;
    }
  }

  constexpr std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Adapter so CounterStream can drive <random> distributions.
class CounterEngine {
 public:
  using result_type = std::uint64_t;
  explicit CounterEngine(std::uint64_t key) : stream_(key) {}
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  result_type operator()() { return stream_.next(); }

 private:
  CounterStream stream_;
};

}  // namespace fpplab
