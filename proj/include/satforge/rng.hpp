#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace satforge {

/// Named substreams. Each purpose draws from its own engine so that adding a
/// consumer of one stream never shifts the values seen by another.
enum class Stream : std::uint64_t {
  kGeneration = 1,
  kSigns = 2,
  kGraph = 3,
  kInit = 4,
  kShuffle = 5,
  kNegatives = 6,
  kCodeReset = 7,
  kClustering = 8,
  kPermutation = 9,
};

/// Seedable 64-bit generator: a std::mt19937_64 whose seed is the SplitMix64
/// mix of (seed, stream, index). Distribution helpers are implemented here
/// rather than with <random> distributions, whose output is not specified
/// across standard library implementations.
class Rng {
 public:
  Rng(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

  std::uint64_t next() { return engine_(); }

  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound);
  /// Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  /// Uniform double in [0, 1).
  double uniform();
  bool bernoulli(double p) { return uniform() < p; }
  /// Number of failures before the first success, success probability p.
  int geometric(double p);
  /// Standard normal via Box-Muller.
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(items[i - 1], items[j]);
    }
  }

  /// `count` distinct values from [0, population), in draw order.
  std::vector<std::size_t> sample_distinct(std::size_t population, std::size_t count);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace satforge
