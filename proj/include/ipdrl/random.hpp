#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace ipdrl {

/// Pseudo-random stream used by every stochastic component.
///
/// Doubles are built from the top 53 bits of the engine output rather than
/// through std::uniform_real_distribution, so sampled values do not depend
/// on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t key);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) { return uniform() < p; }
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// Derives an independent stream for (master seed, indices...).
///
/// The key is a SplitMix64 chain: k0 = mix(master), k_{j+1} = mix(k_j ^ mix(index_j + j + 1)).
/// The engine is then seeded from the key through std::seed_seq. The same
/// inputs always yield the same stream.
Rng seed_stream(std::uint64_t master, std::initializer_list<std::uint64_t> indices);

/// First index of every stream, separating experiment kinds that share a
/// master seed.
enum class StreamTag : std::uint64_t { Learnability = 1, Online = 2, Batch = 3 };

constexpr std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

}  // namespace ipdrl
