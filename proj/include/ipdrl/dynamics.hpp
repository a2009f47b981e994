#pragma once

// Deterministic strategy-average learning dynamics in value space: the
// infinite-batch limit of the temporal-difference update.

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ipdrl/exact_eval.hpp"
#include "ipdrl/random.hpp"
#include "ipdrl/strategies.hpp"

namespace ipdrl {

/// Learning rate in (0, 1].
class LearningRate {
 public:
  explicit LearningRate(double alpha);
  double value() const { return value_; }

 private:
  double value_;
};

struct JointQ {
  QTable q1;
  QTable q2;

  const QTable& of(Seat i) const { return i == Seat::One ? q1 : q2; }
  QTable& of(Seat i) { return i == Seat::One ? q1 : q2; }
  StrategyPair greedy_pair() const { return {greedy_strategy(q1), greedy_strategy(q2)}; }
  friend bool operator==(const JointQ&, const JointQ&) = default;
};

enum class Outcome { WSLS, GT, AllD, Other, NonConvergent };
std::string_view to_string(Outcome o);

/// WSLS, GT or AllD when the pair is that symmetric named pair, else Other.
Outcome classify(const StrategyPair& pair);

struct DynamicsOutcome {
  Outcome label;
  long steps;
  JointQ final_q;
};

/// Stopping rule: the greedy pair has been unchanged for `window` steps and
/// the largest entry change is below `tolerance`. When values settle while
/// the pair keeps alternating periodically, the outcome is Other.
struct ConvergenceCriteria {
  int window = 100;
  double tolerance = 1e-9;
  long max_steps = 100'000;
};

/// Range of the i.i.d. uniform initial state-action values.
struct InitRange {
  double low;
  double high;

  /// [-1, 1 / (1 - delta)].
  static InitRange standard(DiscountFactor delta);
};

/// q' = q + alpha (r_x(s,a) + delta * nextq_x(s,a) - q) for every seat and
/// entry simultaneously, evaluated through exact_eval.
JointQ deterministic_step(const JointQ& jq, const GameParams& params, LearningRate alpha,
                          ExplorationRate eps, DiscountFactor delta);

/// Iterates the step (through the batched kernel) until the stopping rule holds.
DynamicsOutcome run_to_convergence(const JointQ& start, const GameParams& params,
                                   LearningRate alpha, ExplorationRate eps, DiscountFactor delta,
                                   const ConvergenceCriteria& criteria = {});

/// Same as run_to_convergence for many starts at once; results in input order.
std::vector<DynamicsOutcome> run_many_to_convergence(const std::vector<JointQ>& starts,
                                                     const GameParams& params, LearningRate alpha,
                                                     ExplorationRate eps, DiscountFactor delta,
                                                     const ConvergenceCriteria& criteria = {});

/// Draws both tables entry by entry in (seat, state, action) order.
JointQ random_joint_q(Rng& rng, const InitRange& range);

struct LearnabilityCell {
  double alpha;
  double epsilon;
  int n;
  std::array<int, 5> counts{};  // indexed by Outcome

  double fraction(Outcome o) const {
    return static_cast<double>(counts[static_cast<int>(o)]) / n;
  }
};

struct LearnabilitySpec {
  GameParams params;
  double delta;
  std::vector<double> alphas;
  std::vector<double> epsilons;
  int samples = 250;
  std::uint64_t seed = 0;
  std::optional<InitRange> init;  // defaults to InitRange::standard
  ConvergenceCriteria criteria;
};

/// Cells ordered alpha-major. Sample k of cell c draws its start from
/// seed_stream(seed, {StreamTag::Learnability, c, k}).
std::vector<LearnabilityCell> learnability_sweep(const LearnabilitySpec& spec,
                                                 unsigned workers = 0);

}  // namespace ipdrl
