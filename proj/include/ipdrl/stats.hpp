#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

#include "ipdrl/strategies.hpp"

namespace ipdrl {

/// Two-sided 95% normal quantile used for every reported interval.
inline constexpr double kZ95 = 1.959964;

struct Interval {
  double lo;
  double hi;
};

/// Wilson score interval for k successes in n trials, clamped to [0, 1].
/// Throws ValidationError for n == 0 or k outside [0, n].
Interval wilson_interval(std::int64_t k, std::int64_t n, double z = kZ95);

struct EquilibriumCounts {
  std::int64_t wsls = 0;
  std::int64_t gt = 0;
  std::int64_t alld = 0;
  std::int64_t other = 0;

  std::int64_t total() const { return wsls + gt + alld + other; }
};

struct EquilibriumFractions {
  double wsls;
  double gt;
  double alld;
  double other;
};

/// Counts the symmetric named pairs; everything else is other.
EquilibriumCounts equilibrium_counts(std::span<const StrategyPair> samples);

/// Throws ValidationError on an empty sample.
EquilibriumFractions equilibrium_fractions(std::span<const StrategyPair> samples);

/// First t whose fraction reaches theta; empty when it never does.
std::optional<std::int64_t> time_to_threshold(std::span<const std::pair<std::int64_t, double>> series,
                                              double theta);

}  // namespace ipdrl
