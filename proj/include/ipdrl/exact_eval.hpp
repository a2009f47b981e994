#pragma once

// Strategy-average evaluation of a joint epsilon-greedy strategy: averaged
// transitions and rewards, state values by a direct 4x4 solve, and
// state-action qualities. Every average enumerates the four joint actions
// explicitly.

#include <array>

#include "ipdrl/core_env.hpp"
#include "ipdrl/strategies.hpp"

namespace ipdrl {

/// Discount factor in [0, 1).
class DiscountFactor {
 public:
  explicit DiscountFactor(double delta);
  double value() const { return value_; }

 private:
  double value_;
};

struct JointStrategy {
  MixedStrategy x1;
  MixedStrategy x2;

  const MixedStrategy& of(Seat i) const { return i == Seat::One ? x1 : x2; }
};

JointStrategy make_joint_strategy(const StrategyPair& pair, ExplorationRate eps);

using StateVector = std::array<double, kNumStates>;
using TransitionMatrix = std::array<StateVector, kNumStates>;

/// Per seat, a vector over states.
using SeatStateVectors = std::array<StateVector, 2>;

/// Distribution over next states for each (state, own action).
using AgentTransition = std::array<std::array<StateVector, kNumActions>, kNumStates>;

/// Thrown when the linear solve for state values breaks down.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// p(s, s') under the joint strategy.
TransitionMatrix joint_transition(const JointStrategy& js);

/// Expected immediate reward of each seat in each state, r(s).
SeatStateVectors average_state_reward(const JointStrategy& js, const GameParams& params);

/// v = (I - delta P)^-1 r for both seats.
SeatStateVectors state_values(const JointStrategy& js, const GameParams& params,
                              DiscountFactor delta);

/// p^i(s' | a, s): the co-player's action is averaged out.
AgentTransition agent_transition(Seat i, const JointStrategy& js);

/// Expected immediate reward r^i(s, a) when seat i plays a at s.
QTable average_action_reward(Seat i, const JointStrategy& js, const GameParams& params);

/// q^i(s, a) = r^i(s, a) + delta * sum_s' p^i(s'|a, s) v^i(s').
QTable state_action_quality(Seat i, const JointStrategy& js, const GameParams& params,
                            DiscountFactor delta);

/// Expected own-strategy average of q^i at the next state after (s, a).
QTable next_state_quality(Seat i, const JointStrategy& js, const GameParams& params,
                          DiscountFactor delta);

/// Solves A x = b for a 4x4 system by Gaussian elimination with partial
/// pivoting. Throws NumericalError on a (near) singular pivot.
StateVector solve4(TransitionMatrix a, StateVector b);

}  // namespace ipdrl
