#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "ipdrl/core_env.hpp"

namespace ipdrl {

/// Exploration rate of an epsilon-greedy policy, in [0, 1].
class ExplorationRate {
 public:
  explicit ExplorationRate(double epsilon);
  double value() const { return value_; }

 private:
  double value_;
};

/// State-action values over 4 states x 2 actions.
struct QTable {
  std::array<std::array<double, kNumActions>, kNumStates> values{};

  double& operator()(State s, Action a) { return values[index(s)][index(a)]; }
  double operator()(State s, Action a) const { return values[index(s)][index(a)]; }

  bool is_finite() const;
  friend bool operator==(const QTable&, const QTable&) = default;
};

/// Deterministic memory-1 strategy.
///
/// The canonical code is a 4-bit number whose bits, from most to least
/// significant, are the actions at CC, CD, DC, DD; a set bit means C.
/// Written as a bit string in state order: AllD = 0000 (0), GT = 1000 (8),
/// WSLS = 1001 (9), AllC = 1111 (15).
class PureStrategy {
 public:
  static constexpr int kCount = 16;

  constexpr PureStrategy() = default;
  static PureStrategy from_code(int code);
  static PureStrategy from_actions(const std::array<Action, kNumStates>& actions);

  constexpr int code() const { return code_; }
  constexpr Action action(State s) const {
    return ((code_ >> (3 - index(s))) & 1) != 0 ? Action::C : Action::D;
  }
  std::array<Action, kNumStates> actions() const;

  /// Bit string in state order, e.g. "1001" for WSLS.
  std::string to_string() const;

  friend constexpr bool operator==(PureStrategy, PureStrategy) = default;

 private:
  explicit constexpr PureStrategy(std::uint8_t code) : code_(code) {}
  std::uint8_t code_ = 0;
};

/// Strategies of both seats; canonical index 16 * code(s1) + code(s2).
struct StrategyPair {
  static constexpr int kCount = PureStrategy::kCount * PureStrategy::kCount;

  PureStrategy s1;
  PureStrategy s2;

  int index() const { return PureStrategy::kCount * s1.code() + s2.code(); }
  static StrategyPair from_index(int idx);
  PureStrategy of(Seat i) const { return i == Seat::One ? s1 : s2; }

  friend bool operator==(const StrategyPair&, const StrategyPair&) = default;
};

/// Per-state action probabilities x(a|s); rows sum to one.
struct MixedStrategy {
  std::array<std::array<double, kNumActions>, kNumStates> probs{};

  double operator()(Action a, State s) const { return probs[index(s)][index(a)]; }
  bool is_normalized(double tol = 1e-12) const;
};

/// Greedy action per state; ties resolve to D.
PureStrategy greedy_strategy(const QTable& q);

/// x(C|s) = 1 - eps/2 if q(s,C) > q(s,D), else eps/2.
MixedStrategy epsilon_greedy(const QTable& q, ExplorationRate eps);

MixedStrategy pure_to_mixed(PureStrategy sigma, ExplorationRate eps);

enum class NamedStrategy { AllD, GT, WSLS, TfT };

/// Tit-for-tat copies the co-player's last action, so its state map depends
/// on the seat; the other named strategies are seat independent.
PureStrategy named_strategy(NamedStrategy name, Seat seat = Seat::One);

/// Parses "AllD", "GT", "WSLS" or "TfT"; throws ValidationError otherwise.
NamedStrategy parse_named_strategy(std::string_view name);
std::string_view to_string(NamedStrategy name);

/// The symmetric pair (name, name), seat resolved.
StrategyPair named_pair(NamedStrategy name);

/// Human-readable label: "WSLS", "GT", "AllD", "TfT" for the named pairs,
/// otherwise "s1/s2" bit strings.
std::string describe(const StrategyPair& pair);

}  // namespace ipdrl
