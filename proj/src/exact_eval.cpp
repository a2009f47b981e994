#include "ipdrl/exact_eval.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace ipdrl {

DiscountFactor::DiscountFactor(double delta) : value_(delta) {
  if (!(delta >= 0.0 && delta < 1.0)) {
    throw ValidationError("discount factor must lie in [0, 1) (got " + std::to_string(delta) + ")");
  }
}

JointStrategy make_joint_strategy(const StrategyPair& pair, ExplorationRate eps) {
  return {pure_to_mixed(pair.s1, eps), pure_to_mixed(pair.s2, eps)};
}

TransitionMatrix joint_transition(const JointStrategy& js) {
  TransitionMatrix p{};
  for (State s : kAllStates) {
    for (Action a1 : kAllActions) {
      for (Action a2 : kAllActions) {
        const State next = next_state({a1, a2});
        p[index(s)][index(next)] += js.x1(a1, s) * js.x2(a2, s);
      }
    }
  }
  return p;
}

SeatStateVectors average_state_reward(const JointStrategy& js, const GameParams& params) {
  SeatStateVectors r{};
  for (State s : kAllStates) {
    for (Action a1 : kAllActions) {
      for (Action a2 : kAllActions) {
        const double prob = js.x1(a1, s) * js.x2(a2, s);
        const RewardPair rew = reward_of_state(params, next_state({a1, a2}));
        r[0][index(s)] += prob * rew[0];
        r[1][index(s)] += prob * rew[1];
      }
    }
  }
  return r;
}

StateVector solve4(TransitionMatrix a, StateVector b) {
  constexpr int n = kNumStates;
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(a[row][col]) > std::abs(a[pivot][col])) pivot = row;
    }
    if (!(std::abs(a[pivot][col]) > 1e-300)) {
      throw NumericalError("singular system in state value solve");
    }
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (int row = col + 1; row < n; ++row) {
      const double f = a[row][col] / a[col][col];
      for (int k = col; k < n; ++k) a[row][k] -= f * a[col][k];
      b[row] -= f * b[col];
    }
  }
  StateVector x{};
  for (int row = n - 1; row >= 0; --row) {
    double acc = b[row];
    for (int k = row + 1; k < n; ++k) acc -= a[row][k] * x[k];
    x[row] = acc / a[row][row];
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw NumericalError("non-finite state value");
  }
  return x;
}

SeatStateVectors state_values(const JointStrategy& js, const GameParams& params,
                              DiscountFactor delta) {
  const TransitionMatrix p = joint_transition(js);
  const SeatStateVectors r = average_state_reward(js, params);
  TransitionMatrix lhs{};
  for (int s = 0; s < kNumStates; ++s) {
    for (int t = 0; t < kNumStates; ++t) {
      lhs[s][t] = (s == t ? 1.0 : 0.0) - delta.value() * p[s][t];
    }
  }
  return {solve4(lhs, r[0]), solve4(lhs, r[1])};
}

AgentTransition agent_transition(Seat i, const JointStrategy& js) {
  const MixedStrategy& co = js.of(other(i));
  AgentTransition p{};
  for (State s : kAllStates) {
    for (Action own : kAllActions) {
      for (Action theirs : kAllActions) {
        const State next = next_state(seat_joint_action(i, own, theirs));
        p[index(s)][index(own)][index(next)] += co(theirs, s);
      }
    }
  }
  return p;
}

QTable average_action_reward(Seat i, const JointStrategy& js, const GameParams& params) {
  const AgentTransition p = agent_transition(i, js);
  QTable r;
  for (State s : kAllStates) {
    for (Action a : kAllActions) {
      double acc = 0.0;
      for (State next : kAllStates) {
        acc += p[index(s)][index(a)][index(next)] * reward_of_state(params, next)[index(i)];
      }
      r(s, a) = acc;
    }
  }
  return r;
}

QTable state_action_quality(Seat i, const JointStrategy& js, const GameParams& params,
                            DiscountFactor delta) {
  const AgentTransition p = agent_transition(i, js);
  const StateVector v = state_values(js, params, delta)[index(i)];
  QTable q = average_action_reward(i, js, params);
  for (State s : kAllStates) {
    for (Action a : kAllActions) {
      double cont = 0.0;
      for (State next : kAllStates) cont += p[index(s)][index(a)][index(next)] * v[index(next)];
      q(s, a) += delta.value() * cont;
    }
  }
  return q;
}

QTable next_state_quality(Seat i, const JointStrategy& js, const GameParams& params,
                          DiscountFactor delta) {
  const AgentTransition p = agent_transition(i, js);
  const QTable q = state_action_quality(i, js, params, delta);
  const MixedStrategy& own = js.of(i);
  StateVector own_average{};
  for (State next : kAllStates) {
    for (Action b : kAllActions) own_average[index(next)] += own(b, next) * q(next, b);
  }
  QTable out;
  for (State s : kAllStates) {
    for (Action a : kAllActions) {
      double acc = 0.0;
      for (State next : kAllStates) {
        acc += p[index(s)][index(a)][index(next)] * own_average[index(next)];
      }
      out(s, a) = acc;
    }
  }
  return out;
}

}  // namespace ipdrl
