#pragma once

#include <array>
#include <cstdint>

#include "fpplab/rng.hpp"

namespace fpplab::detail {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

inline std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  base %= m;
  while (exp) {
    if (exp & 1) r = mulmod(r, base, m);
    base = mulmod(base, base, m);
    exp >>= 1;
  }
  return r;
}

// Deterministic Miller-Rabin for 64-bit inputs.
inline bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  std::uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  for (std::uint64_t a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
    std::uint64_t x = powmod(a % n, d, n);
    if (x == 0 || x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// Two distinct primes in [2^60, 2^61) drawn from the key.
inline std::array<std::uint64_t, 2> random_prime_pair(std::uint64_t key) {
  std::array<std::uint64_t, 2> out{};
  CounterStream stream(key);
  for (std::size_t k = 0; k < 2;) {
    std::uint64_t candidate = ((stream.next() >> 4) | (std::uint64_t{1} << 60)) | 1;
    while (!is_prime(candidate)) candidate += 2;
    if (candidate >= (std::uint64_t{1} << 61)) continue;
    if (k == 1 && candidate == out[0]) continue;
    out[k++] = candidate;
  }
  return out;
}

}  // namespace fpplab::detail
