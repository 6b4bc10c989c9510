#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace sgf {

// Derives a child seed from a root seed and a label so every consumer of
// randomness gets its own stream from one --seed flag.
inline uint64_t derive_seed(uint64_t root, std::string_view label) {
  // FNV-1a over the label, then splitmix64 finalization mixed with the root.
  uint64_t h = 1469598103934665603ull;
  for (char ch : label) {
    h ^= static_cast<uint8_t>(ch);
    h *= 1099511628211ull;
  }
  uint64_t z = root ^ h;
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Deterministic RNG. Distributions are implemented by hand because the
// std::*_distribution algorithms are implementation-defined; mt19937_64
// itself is pinned by the standard, so streams are stable across toolchains.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  int uniform_int(int n) {
    return static_cast<int>(uniform() * static_cast<double>(n));
  }

  // Standard normal via Box-Muller.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return mag * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sgf
