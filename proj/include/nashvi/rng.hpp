#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace nashvi {

// Counter-based generator: output i of stream (seed, stream) is a pure
// function of (seed, stream, i). Distributions are implemented here rather
// than through <random> so that draws are identical across standard
// libraries.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  // Independent child stream, e.g. one per episode.
  [[nodiscard]] constexpr CounterRng split(std::uint64_t stream) const {
    CounterRng child(key_, stream);
    return child;
  }

  constexpr std::uint64_t next_u64() { return mix(key_ + kGolden * ++counter_); }

  // Uniform on [0, 1) with 53 bits.
  constexpr double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform integer in [0, n). Rejection sampling, no modulo bias.
  constexpr std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x = next_u64();
    while (x >= limit) x = next_u64();
    return x % n;
  }

  constexpr bool bernoulli(double p) { return uniform() < p; }

  // Index drawn from a normalized probability vector.
  // Falls back to the last positive entry if rounding leaves mass uncovered.
  std::size_t categorical(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (probs[i] <= 0.0) continue;
      last_positive = i;
      acc += probs[i];
      if (u < acc) return i;
    }
    return last_positive;
  }

  [[nodiscard]] constexpr std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

  // splitmix64 finalizer
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace nashvi
