#include "ipdrl/core_env.hpp"

#include <cmath>
#include <string>

namespace ipdrl {

std::string_view to_string(Action a) { return a == Action::C ? "C" : "D"; }

std::string_view to_string(State s) {
  static constexpr std::array<std::string_view, kNumStates> names{"CC", "CD", "DC", "DD"};
  return names[index(s)];
}

GameParams::GameParams(double temptation, double sucker)
    : temptation_(temptation), sucker_(sucker) {
  if (!std::isfinite(temptation) || !(temptation > 1.0)) {
    throw ValidationError("game.T must satisfy T > 1 (got " + std::to_string(temptation) + ")");
  }
  if (!std::isfinite(sucker) || !(sucker < 0.0)) {
    throw ValidationError("game.S must satisfy S < 0 (got " + std::to_string(sucker) + ")");
  }
}

RewardPair reward(const GameParams& params, JointAction ja) {
  const double t = params.temptation();
  const double s = params.sucker();
  if (ja.a1 == Action::C) {
    return ja.a2 == Action::C ? RewardPair{kRewardPayoff, kRewardPayoff} : RewardPair{s, t};
  }
  return ja.a2 == Action::C ? RewardPair{t, s} : RewardPair{kPunishmentPayoff, kPunishmentPayoff};
}

RewardPair reward_of_state(const GameParams& params, State s) {
  return reward(params, joint_action_of(s));
}

}  // namespace ipdrl
