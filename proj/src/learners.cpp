#include "ipdrl/learners.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace ipdrl {

Action sample_action(const MixedStrategy& x, State s, Rng& rng) {
  return rng.bernoulli(x(Action::C, s)) ? Action::C : Action::D;
}

State sample_initial_state(Rng& rng) { return static_cast<State>(rng.below(kNumStates)); }

namespace {

double expected_value(const MixedStrategy& x, const QTable& q, State s) {
  return x(Action::C, s) * q(s, Action::C) + x(Action::D, s) * q(s, Action::D);
}

}  // namespace

OnlineLearner::OnlineLearner(QTable q, LearnerParams params) : q_(q), params_(params) {
  if (!q_.is_finite()) throw ValidationError("initial Q-table must be finite");
}

void OnlineLearner::update(State s, Action a, double r, State next) {
  const MixedStrategy x = policy();
  const double alpha = params_.alpha.value();
  const double target = r + params_.delta.value() * expected_value(x, q_, next);
  q_(s, a) = (1.0 - alpha) * q_(s, a) + alpha * target;
}

std::int64_t BatchModel::total_visits() const {
  std::int64_t total = 0;
  for (const auto& row : visits) {
    for (auto n : row) total += n;
  }
  return total;
}

bool BatchModel::consistent() const {
  for (State s : kAllStates) {
    for (Action a : kAllActions) {
      std::int64_t sum = 0;
      for (auto c : next_counts[index(s)][index(a)]) {
        if (c < 0) return false;
        sum += c;
      }
      if (sum != visits[index(s)][index(a)]) return false;
    }
  }
  return true;
}

bool BatchModel::empty() const {
  if (total_visits() != 0) return false;
  for (const auto& row : reward_sums) {
    for (double r : row) {
      if (r != 0.0) return false;
    }
  }
  for (const auto& per_state : next_counts) {
    for (const auto& per_action : per_state) {
      for (auto c : per_action) {
        if (c != 0) return false;
      }
    }
  }
  return true;
}

BatchLearner::BatchLearner(QTable q_init, LearnerParams params, std::int64_t batch_size)
    : q_act_(q_init),
      q_val_(q_init),
      x_(epsilon_greedy(q_init, params.epsilon)),
      params_(params),
      batch_size_(batch_size) {
  if (batch_size < 1) {
    throw ValidationError("learner.batch_size must be >= 1 (got " + std::to_string(batch_size) + ")");
  }
  if (!q_init.is_finite()) throw ValidationError("initial Q-table must be finite");
}

double BatchLearner::observe(State s, Action a, double r, State next) {
  auto& n = model_.visits[index(s)][index(a)];
  ++n;
  ++model_.next_counts[index(s)][index(a)][index(next)];
  model_.reward_sums[index(s)][index(a)] += r;
  const double step = 1.0 / static_cast<double>(n + 1);
  const double target = r + params_.delta.value() * expected_value(x_, q_val_, next);
  q_val_(s, a) = (1.0 - step) * q_val_(s, a) + step * target;
  return step;
}

QTable BatchLearner::batch_target() const {
  StateVector next_value{};
  for (State z : kAllStates) next_value[index(z)] = expected_value(x_, q_val_, z);
  QTable target;
  for (State s : kAllStates) {
    for (Action a : kAllActions) {
      const double norm =
          static_cast<double>(std::max<std::int64_t>(1, model_.visits[index(s)][index(a)]));
      const double r = model_.reward_sums[index(s)][index(a)] / norm;
      double v = 0.0;
      for (State z : kAllStates) {
        v += static_cast<double>(model_.next_counts[index(s)][index(a)][index(z)]) / norm *
             next_value[index(z)];
      }
      target(s, a) = r + params_.delta.value() * v;
    }
  }
  return target;
}

void BatchLearner::adapt() {
  // Entries are visited in (state, action) order. Each one sees x and q_val
  // as already rewritten by the entries before it.
  const double alpha = params_.alpha.value();
  const double delta = params_.delta.value();
  for (State s : kAllStates) {
    for (Action a : kAllActions) {
      const auto n = model_.visits[index(s)][index(a)];
      const double norm = static_cast<double>(std::max<std::int64_t>(1, n));
      double v = 0.0;
      for (State z : kAllStates) {
        v += static_cast<double>(model_.next_counts[index(s)][index(a)][index(z)]) / norm *
             expected_value(x_, q_val_, z);
      }
      const double target = model_.reward_sums[index(s)][index(a)] / norm + delta * v;
      q_act_(s, a) = (1.0 - alpha) * q_act_(s, a) + alpha * target;
      x_ = epsilon_greedy(q_act_, params_.epsilon);
      q_val_(s, a) = q_act_(s, a);
    }
  }
  model_.reset();
}

State batch_interact(BatchLearner& agent1, BatchLearner& agent2, const GameParams& params,
                     State state, std::int64_t steps, Rng& rng) {
  for (std::int64_t k = 0; k < steps; ++k) {
    const Action a1 = agent1.act(state, rng);
    const Action a2 = agent2.act(state, rng);
    const JointAction ja{a1, a2};
    const RewardPair r = reward(params, ja);
    const State next = next_state(ja);
    agent1.observe(state, a1, r[0], next);
    agent2.observe(state, a2, r[1], next);
    state = next;
  }
  return state;
}

BatchRun run_batch_learning(BatchLearner& agent1, BatchLearner& agent2, const GameParams& params,
                            std::int64_t total_steps, Rng& rng) {
  if (agent1.batch_size() != agent2.batch_size()) {
    throw ValidationError("both batch learners must share one batch size");
  }
  const std::int64_t k = agent1.batch_size();
  if (total_steps < k) throw ValidationError("experiment.steps must be >= learner.batch_size");
  BatchRun run;
  State state = sample_initial_state(rng);
  const std::int64_t batches = total_steps / k;
  run.greedy_pairs.reserve(static_cast<std::size_t>(batches));
  for (std::int64_t b = 0; b < batches; ++b) {
    state = batch_interact(agent1, agent2, params, state, k, rng);
    agent1.adapt();
    agent2.adapt();
    run.greedy_pairs.push_back({greedy_strategy(agent1.q_act()), greedy_strategy(agent2.q_act())});
  }
  run.final_state = state;
  return run;
}

std::vector<OnlineSnapshot> run_online_learning(OnlineLearner& agent1, OnlineLearner& agent2,
                                                const GameParams& params,
                                                const OnlineRunOptions& options, Rng& rng) {
  if (options.total_steps < 1) throw ValidationError("experiment.steps must be >= 1");
  if (options.stride < 1 || options.window < 1) {
    throw ValidationError("snapshot stride and cooperation window must be >= 1");
  }
  std::vector<OnlineSnapshot> out;
  out.reserve(static_cast<std::size_t>(options.total_steps / options.stride + 1));
  std::vector<char> ring(static_cast<std::size_t>(options.window), 0);
  std::int64_t in_window = 0;
  State state = options.initial_state ? *options.initial_state : sample_initial_state(rng);
  for (std::int64_t t = 1; t <= options.total_steps; ++t) {
    const Action a1 = agent1.act(state, rng);
    const Action a2 = agent2.act(state, rng);
    const JointAction ja{a1, a2};
    const RewardPair r = reward(params, ja);
    const State next = next_state(ja);
    agent1.update(state, a1, r[0], next);
    agent2.update(state, a2, r[1], next);
    state = next;

    const char coop = (a1 == Action::C && a2 == Action::C) ? 1 : 0;
    char& slot = ring[static_cast<std::size_t>((t - 1) % options.window)];
    in_window += coop - slot;
    slot = coop;
    if (t % options.stride == 0 || t == options.total_steps) {
      const std::int64_t span = std::min(t, options.window);
      out.push_back({t,
                     {greedy_strategy(agent1.q()), greedy_strategy(agent2.q())},
                     static_cast<double>(in_window) / static_cast<double>(span)});
    }
  }
  return out;
}

}  // namespace ipdrl
