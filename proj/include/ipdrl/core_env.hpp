#pragma once

// Memory-1 iterated Prisoner's Dilemma: the state is the previous round's
// joint action, transitions are deterministic in the joint action.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ipdrl {

/// Cooperate or defect. The order C < D is fixed for all encodings.
enum class Action : std::uint8_t { C = 0, D = 1 };

/// Previous joint action; the first letter is agent 1's action.
enum class State : std::uint8_t { CC = 0, CD = 1, DC = 2, DD = 3 };

/// Seat of an agent in the two-player game.
enum class Seat : std::uint8_t { One = 0, Two = 1 };

inline constexpr int kNumStates = 4;
inline constexpr int kNumActions = 2;

inline constexpr std::array<State, kNumStates> kAllStates{State::CC, State::CD, State::DC,
                                                          State::DD};
inline constexpr std::array<Action, kNumActions> kAllActions{Action::C, Action::D};
inline constexpr std::array<Seat, 2> kAllSeats{Seat::One, Seat::Two};

// Fixed payoffs for mutual cooperation and mutual defection.
inline constexpr double kRewardPayoff = 1.0;
inline constexpr double kPunishmentPayoff = 0.0;

constexpr int index(Action a) { return static_cast<int>(a); }
constexpr int index(State s) { return static_cast<int>(s); }
constexpr int index(Seat i) { return static_cast<int>(i); }

constexpr Action other(Action a) { return a == Action::C ? Action::D : Action::C; }
constexpr Seat other(Seat i) { return i == Seat::One ? Seat::Two : Seat::One; }

struct JointAction {
  Action a1;
  Action a2;

  constexpr Action of(Seat i) const { return i == Seat::One ? a1 : a2; }
  friend constexpr bool operator==(const JointAction&, const JointAction&) = default;
};

/// Joint action assembled from one agent's own action and its co-player's.
constexpr JointAction seat_joint_action(Seat i, Action own, Action co_player) {
  return i == Seat::One ? JointAction{own, co_player} : JointAction{co_player, own};
}

constexpr State next_state(JointAction ja) {
  return static_cast<State>(2 * index(ja.a1) + index(ja.a2));
}

/// Inverse of next_state.
constexpr JointAction joint_action_of(State s) {
  return {static_cast<Action>(index(s) / 2), static_cast<Action>(index(s) % 2)};
}

std::string_view to_string(Action a);
std::string_view to_string(State s);

/// Thrown when a domain value violates its invariants.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Temptation T and sucker S payoffs. R = 1 and P = 0 are fixed.
/// Construction enforces the dilemma ordering T > 1 > 0 > S.
class GameParams {
 public:
  GameParams(double temptation, double sucker);

  double temptation() const { return temptation_; }
  double sucker() const { return sucker_; }

  friend bool operator==(const GameParams&, const GameParams&) = default;

 private:
  double temptation_;
  double sucker_;
};

/// Rewards of both agents, indexed by seat.
using RewardPair = std::array<double, 2>;

RewardPair reward(const GameParams& params, JointAction ja);

/// Rewards as a function of the state the joint action leads to.
RewardPair reward_of_state(const GameParams& params, State s);

}  // namespace ipdrl
