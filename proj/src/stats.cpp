#include "ipdrl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ipdrl/dynamics.hpp"

namespace ipdrl {

Interval wilson_interval(std::int64_t k, std::int64_t n, double z) {
  if (n <= 0) throw ValidationError("wilson interval needs n >= 1");
  if (k < 0 || k > n) throw ValidationError("wilson interval needs 0 <= k <= n");
  if (!(z > 0.0)) throw ValidationError("wilson interval needs z > 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = (z / denom) * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  Interval out{std::clamp(center - half, 0.0, 1.0), std::clamp(center + half, 0.0, 1.0)};
  // Pin the closed ends exactly; rounding can leave 1e-17 residue otherwise.
  if (k == 0) out.lo = 0.0;
  if (k == n) out.hi = 1.0;
  return out;
}

EquilibriumCounts equilibrium_counts(std::span<const StrategyPair> samples) {
  EquilibriumCounts c;
  for (const StrategyPair& p : samples) {
    switch (classify(p)) {
      case Outcome::WSLS:
        ++c.wsls;
        break;
      case Outcome::GT:
        ++c.gt;
        break;
      case Outcome::AllD:
        ++c.alld;
        break;
      default:
        ++c.other;
        break;
    }
  }
  return c;
}

EquilibriumFractions equilibrium_fractions(std::span<const StrategyPair> samples) {
  if (samples.empty()) throw ValidationError("equilibrium fractions need at least one sample");
  const EquilibriumCounts c = equilibrium_counts(samples);
  const double n = static_cast<double>(samples.size());
  const double wsls = static_cast<double>(c.wsls) / n;
  const double gt = static_cast<double>(c.gt) / n;
  const double alld = static_cast<double>(c.alld) / n;
  return {wsls, gt, alld, static_cast<double>(c.other) / n};
}

std::optional<std::int64_t> time_to_threshold(
    std::span<const std::pair<std::int64_t, double>> series, double theta) {
  for (const auto& [t, frac] : series) {
    if (frac >= theta) return t;
  }
  return std::nullopt;
}

}  // namespace ipdrl
