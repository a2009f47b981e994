#include "ipdrl/strategies.hpp"

#include <cmath>

namespace ipdrl {

ExplorationRate::ExplorationRate(double epsilon) : value_(epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ValidationError("exploration rate must lie in [0, 1] (got " + std::to_string(epsilon) +
                          ")");
  }
}

bool QTable::is_finite() const {
  for (const auto& row : values) {
    for (double v : row) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

PureStrategy PureStrategy::from_code(int code) {
  if (code < 0 || code >= kCount) {
    throw ValidationError("pure strategy code out of range: " + std::to_string(code));
  }
  return PureStrategy(static_cast<std::uint8_t>(code));
}

PureStrategy PureStrategy::from_actions(const std::array<Action, kNumStates>& actions) {
  int code = 0;
  for (State s : kAllStates) {
    if (actions[index(s)] == Action::C) code |= 1 << (3 - index(s));
  }
  return PureStrategy(static_cast<std::uint8_t>(code));
}

std::array<Action, kNumStates> PureStrategy::actions() const {
  std::array<Action, kNumStates> out{};
  for (State s : kAllStates) out[index(s)] = action(s);
  return out;
}

std::string PureStrategy::to_string() const {
  std::string out;
  for (State s : kAllStates) out.push_back(action(s) == Action::C ? '1' : '0');
  return out;
}

StrategyPair StrategyPair::from_index(int idx) {
  if (idx < 0 || idx >= kCount) {
    throw ValidationError("strategy pair index out of range: " + std::to_string(idx));
  }
  return {PureStrategy::from_code(idx / PureStrategy::kCount),
          PureStrategy::from_code(idx % PureStrategy::kCount)};
}

bool MixedStrategy::is_normalized(double tol) const {
  for (const auto& row : probs) {
    for (double p : row) {
      if (!(p >= 0.0 && p <= 1.0)) return false;
    }
    if (std::abs(row[0] + row[1] - 1.0) > tol) return false;
  }
  return true;
}

PureStrategy greedy_strategy(const QTable& q) {
  std::array<Action, kNumStates> actions{};
  for (State s : kAllStates) {
    actions[index(s)] = q(s, Action::C) > q(s, Action::D) ? Action::C : Action::D;
  }
  return PureStrategy::from_actions(actions);
}

namespace {

MixedStrategy mixed_from_actions(const std::array<Action, kNumStates>& chosen, double eps) {
  MixedStrategy x;
  const double high = 1.0 - eps / 2.0;
  const double low = eps / 2.0;
  for (State s : kAllStates) {
    const bool coop = chosen[index(s)] == Action::C;
    x.probs[index(s)][index(Action::C)] = coop ? high : low;
    x.probs[index(s)][index(Action::D)] = coop ? low : high;
  }
  return x;
}

}  // namespace

MixedStrategy epsilon_greedy(const QTable& q, ExplorationRate eps) {
  return mixed_from_actions(greedy_strategy(q).actions(), eps.value());
}

MixedStrategy pure_to_mixed(PureStrategy sigma, ExplorationRate eps) {
  return mixed_from_actions(sigma.actions(), eps.value());
}

PureStrategy named_strategy(NamedStrategy name, Seat seat) {
  switch (name) {
    case NamedStrategy::AllD:
      return PureStrategy::from_code(0b0000);
    case NamedStrategy::GT:
      return PureStrategy::from_code(0b1000);
    case NamedStrategy::WSLS:
      return PureStrategy::from_code(0b1001);
    case NamedStrategy::TfT:
      // Seat one reads agent 2's action (second letter), seat two reads the first.
      return seat == Seat::One ? PureStrategy::from_code(0b1010) : PureStrategy::from_code(0b1100);
  }
  throw ValidationError("unknown strategy");
}

NamedStrategy parse_named_strategy(std::string_view name) {
  if (name == "AllD") return NamedStrategy::AllD;
  if (name == "GT") return NamedStrategy::GT;
  if (name == "WSLS") return NamedStrategy::WSLS;
  if (name == "TfT") return NamedStrategy::TfT;
  throw ValidationError("unknown strategy name: " + std::string(name));
}

std::string_view to_string(NamedStrategy name) {
  switch (name) {
    case NamedStrategy::AllD:
      return "AllD";
    case NamedStrategy::GT:
      return "GT";
    case NamedStrategy::WSLS:
      return "WSLS";
    case NamedStrategy::TfT:
      return "TfT";
  }
  return "?";
}

StrategyPair named_pair(NamedStrategy name) {
  return {named_strategy(name, Seat::One), named_strategy(name, Seat::Two)};
}

std::string describe(const StrategyPair& pair) {
  for (NamedStrategy n :
       {NamedStrategy::WSLS, NamedStrategy::GT, NamedStrategy::AllD, NamedStrategy::TfT}) {
    if (pair == named_pair(n)) return std::string(to_string(n));
  }
  return pair.s1.to_string() + "/" + pair.s2.to_string();
}

}  // namespace ipdrl
