#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>

namespace hydrolim {

// splitmix64 step, used for seeding and for hashing stream tags.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Self-contained xoshiro256++ generator.  All distributions are implemented
// here rather than via <random> so that streams are reproducible independent
// of the standard library build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : s_) word = splitmix64_next(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Uniform integer on [0, n); unbiased via bitmask rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t mask = ~0ull >> std::countl_zero(n - 1);
    for (;;) {
      const std::uint64_t v = next_u64() & mask;
      if (v < n) return v;
    }
  }

  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  // Standard normal via the polar method; the spare value is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    has_spare_ = true;
    return u * f;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Derives an independent stream from a base seed and a tag path such as
// {replica, copy}.  Identical (seed, path) pairs give identical streams;
// this is what makes multi-threaded experiment runs reproducible.
inline Rng derive_rng(std::uint64_t base_seed,
                      std::initializer_list<std::uint64_t> path) {
  std::uint64_t acc = mix64(base_seed + 0x9e3779b97f4a7c15ull);
  for (std::uint64_t w : path) {
    acc = mix64(acc ^ (w + 0x9e3779b97f4a7c15ull + (acc << 6) + (acc >> 2)));
  }
  return Rng(acc);
}

}  // namespace hydrolim
