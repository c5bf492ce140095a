#ifndef ADMIPC_RNG_HPP
#define ADMIPC_RNG_HPP

#include <cstdint>
#include <limits>
#include <random>
#include <string_view>
#include <vector>

namespace admipc {

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// parent seed and a key.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t mixSeed(std::uint64_t seed, std::uint64_t key) noexcept {
  return splitmix64(splitmix64(seed) ^ (key * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
}

/// Seedable, splittable 64-bit generator: std::mt19937_64 for the stream,
/// SplitMix64 for child-seed derivation. Bounded integers and unit reals are
/// drawn from raw 64-bit outputs with fixed formulas (not std distributions),
/// so sequences are identical across standard library implementations.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64/splitmix64-split/v1";

  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next() { return engine_(); }

  /// Child generator for an independent stream identified by `key`.
  Rng split(std::uint64_t key) const { return Rng(mixSeed(seed_, key)); }

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = next();
    } while (x >= limit);
    return x % bound;
  }

  /// Uniform real in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Draws `k` distinct values from [0, population) uniformly, via a partial
  /// Fisher-Yates shuffle. Result order is the draw order.
  std::vector<std::uint64_t> sampleWithoutReplacement(std::uint64_t population, std::uint64_t k) {
    std::vector<std::uint64_t> pool(population);
    for (std::uint64_t i = 0; i < population; ++i) pool[i] = i;
    if (k > population) k = population;
    for (std::uint64_t i = 0; i < k; ++i) {
      const std::uint64_t j = i + below(population - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace admipc

#endif  // ADMIPC_RNG_HPP
