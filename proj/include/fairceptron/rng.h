#ifndef FAIRCEPTRON_RNG_H_
#define FAIRCEPTRON_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace fairceptron {

// Seeded generator with distribution code written out here instead of the
// <random> distributions, whose outputs are implementation-defined. Every
// draw is reproducible across standard libraries given the same seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for (seed, stream_id), e.g. one per session.
  static Rng ForStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t NextU64() { return engine_(); }

  // Uniform integer in [0, bound). bound must be positive.
  std::uint64_t UniformIndex(std::uint64_t bound);

  // Uniform double in [0, 1) with 53 random bits.
  double Uniform01();

  bool Coin() { return (NextU64() >> 63) != 0; }

  // Standard normal via Box-Muller; caches the second variate.
  double Normal();

  template <typename T>
  void Shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = UniformIndex(i);
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

std::uint64_t SplitMix64(std::uint64_t x);

}  // namespace fairceptron

#endif  // FAIRCEPTRON_RNG_H_
