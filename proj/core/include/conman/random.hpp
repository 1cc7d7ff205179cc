#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string_view>

namespace conman {

// SplitMix64. Every random draw in the toolkit goes through this generator so
// that other implementations can reproduce drafts and simulations bit for bit.
// Reference vector (seed 0): e220a8397b1dcdaf 6e789e6aa1b965f4 06c45d188009454f
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, n) by 128-bit multiply-high. n must be > 0.
  constexpr std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  // Uniform double in [0, 1) with 53 bits of precision.
  constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Poisson by inversion. Large means are split into chunks of at most 10
  // (a sum of independent Poissons is Poisson) so exp(-lambda) never
  // underflows.
  std::uint32_t poisson(double lambda) {
    std::uint32_t total = 0;
    while (lambda > 0) {
      const double part = lambda > 10.0 ? 10.0 : lambda;
      lambda -= part;
      const double limit = std::exp(-part);
      double prod = uniform();
      while (prod >= limit) {
        prod *= uniform();
        ++total;
      }
    }
    return total;
  }

  template <typename T>
  const T& pick(std::span<const T> items) {
    return items[below(items.size())];
  }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

// Independent sub-stream seed for (base, tag). Used to give each simulated
// account its own stream so adding accounts never perturbs existing ones.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  SplitMix64 g(base ^ (0xD1B54A32D192ED03ULL * (tag + 1)));
  g.next();
  return g.next();
}

// FNV-1a, used to fold strings into seeds.
constexpr std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

}  // namespace conman
