#pragma once

#include <cstdint>
#include <random>

namespace pbpoll {

/// Stable stream splitting: the child seed depends only on (root, stream), so
/// adding a stream never perturbs the others.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream);

/// Seeded engine with distributions implemented here rather than taken from
/// <random>, whose distribution algorithms differ between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);

  /// Uniform in [0, 1).
  double unit();

  bool bernoulli(double p) { return unit() < p; }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace pbpoll
