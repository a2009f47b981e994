#pragma once

// Stochastic learners: online Expected SARSA with epsilon-greedy
// exploration, and the sample-batch learner that freezes its strategy for K
// steps, builds a count model, then adapts once.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "ipdrl/dynamics.hpp"
#include "ipdrl/exact_eval.hpp"
#include "ipdrl/random.hpp"
#include "ipdrl/strategies.hpp"

namespace ipdrl {

struct LearnerParams {
  LearningRate alpha;
  ExplorationRate epsilon;
  DiscountFactor delta;
};

/// Samples an action from x(.|s).
Action sample_action(const MixedStrategy& x, State s, Rng& rng);

/// Uniform over the four states.
State sample_initial_state(Rng& rng);

class OnlineLearner {
 public:
  OnlineLearner(QTable q, LearnerParams params);

  const QTable& q() const { return q_; }
  const LearnerParams& params() const { return params_; }
  MixedStrategy policy() const { return epsilon_greedy(q_, params_.epsilon); }
  Action act(State s, Rng& rng) const { return sample_action(policy(), s, rng); }

  /// q(s,a) <- (1-alpha) q(s,a) + alpha [r + delta sum_b x(b|s') q(s',b)],
  /// x being the epsilon-greedy strategy of the table before the update.
  void update(State s, Action a, double r, State next);

 private:
  QTable q_;
  LearnerParams params_;
};

/// Visit counts, next-state counts and reward sums per (s, a).
struct BatchModel {
  std::array<std::array<std::int64_t, kNumActions>, kNumStates> visits{};
  std::array<std::array<std::array<std::int64_t, kNumStates>, kNumActions>, kNumStates> next_counts{};
  std::array<std::array<double, kNumActions>, kNumStates> reward_sums{};

  void reset() { *this = BatchModel{}; }
  std::int64_t total_visits() const;
  /// Next-state counts of every (s, a) sum to its visit count.
  bool consistent() const;
  bool empty() const;
};

class BatchLearner {
 public:
  BatchLearner(QTable q_init, LearnerParams params, std::int64_t batch_size);

  const QTable& q_act() const { return q_act_; }
  const QTable& q_val() const { return q_val_; }
  const BatchModel& model() const { return model_; }
  const MixedStrategy& policy() const { return x_; }
  const LearnerParams& params() const { return params_; }
  std::int64_t batch_size() const { return batch_size_; }

  Action act(State s, Rng& rng) const { return sample_action(x_, s, rng); }

  /// Interaction-phase bookkeeping for one observed transition. Returns the
  /// step size 1 / (n(s,a) + 1) used for q_val, after incrementing n(s,a).
  double observe(State s, Action a, double r, State next);

  /// Adaptation phase. For each (s, a) in turn: moves q_act(s,a) toward the
  /// batch-average target, refreshes x, copies the entry into q_val. Later
  /// entries bootstrap from the already rewritten x and q_val. Clears the
  /// model at the end.
  void adapt();

  /// r~(s,a) + delta * v~(s,a) for every entry from the current model, x and
  /// q_val, i.e. the target as seen before any entry is adapted.
  QTable batch_target() const;

 private:
  QTable q_act_;
  QTable q_val_;
  BatchModel model_;
  MixedStrategy x_;
  LearnerParams params_;
  std::int64_t batch_size_;
};

/// Greedy pair after each adaptation of two synchronised batch learners.
struct BatchRun {
  std::vector<StrategyPair> greedy_pairs;  // one per completed batch
  State final_state = State::CC;
};

/// Runs floor(total_steps / K) batches of K joint steps; both agents adapt
/// at the same batch boundary. The initial state is uniform.
BatchRun run_batch_learning(BatchLearner& agent1, BatchLearner& agent2, const GameParams& params,
                            std::int64_t total_steps, Rng& rng);

/// K joint steps of the interaction phase only; returns the state reached.
State batch_interact(BatchLearner& agent1, BatchLearner& agent2, const GameParams& params,
                     State state, std::int64_t steps, Rng& rng);

struct OnlineSnapshot {
  std::int64_t t;           // steps completed
  StrategyPair greedy_pair;
  double coop_rate;         // share of (C, C) in the trailing window
};

struct OnlineRunOptions {
  std::int64_t total_steps;
  std::int64_t stride = 1000;  // snapshot every `stride` steps (and at the end)
  std::int64_t window = 1000;  // trailing cooperation window
  std::optional<State> initial_state;  // uniform when empty
};

std::vector<OnlineSnapshot> run_online_learning(OnlineLearner& agent1, OnlineLearner& agent2,
                                                const GameParams& params,
                                                const OnlineRunOptions& options, Rng& rng);

}  // namespace ipdrl
