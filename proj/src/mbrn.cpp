#include "ipdrl/mbrn.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ipdrl/parallel.hpp"

namespace ipdrl {

namespace {

JointStrategy seat_joint(Seat seat, const MixedStrategy& own, const MixedStrategy& opponent) {
  return seat == Seat::One ? JointStrategy{own, opponent} : JointStrategy{opponent, own};
}

}  // namespace

PureStrategy best_response(Seat seat, PureStrategy opponent, const GameParams& params,
                           ExplorationRate eps, DiscountFactor delta) {
  const MixedStrategy opp = pure_to_mixed(opponent, eps);
  // Policy iteration visits each pure strategy at most once while it strictly
  // improves; the cap only guards against tie-induced flapping.
  PureStrategy current = named_strategy(NamedStrategy::AllD);
  for (int iter = 0; iter <= 2 * PureStrategy::kCount; ++iter) {
    const JointStrategy js = seat_joint(seat, pure_to_mixed(current, eps), opp);
    const PureStrategy improved =
        greedy_strategy(state_action_quality(seat, js, params, delta));
    if (improved == current) return current;
    current = improved;
  }
  return best_response_value_iteration(seat, opponent, params, eps, delta);
}

PureStrategy best_response_value_iteration(Seat seat, PureStrategy opponent,
                                           const GameParams& params, ExplorationRate eps,
                                           DiscountFactor delta, double tol,
                                           long max_iterations) {
  // Opponent mixing is fixed, so rewards and transitions per (s, a) are too.
  const MixedStrategy opp = pure_to_mixed(opponent, eps);
  const JointStrategy js = seat_joint(seat, opp, opp);  // own part unused below
  const AgentTransition p = agent_transition(seat, js);
  const QTable r = average_action_reward(seat, js, params);
  const double hi = 1.0 - eps.value() / 2.0;
  const double lo = eps.value() / 2.0;
  const double d = delta.value();

  QTable q;
  for (long iter = 0; iter < max_iterations; ++iter) {
    StateVector cont{};
    for (State s : kAllStates) {
      const double qc = q(s, Action::C);
      const double qd = q(s, Action::D);
      cont[index(s)] = hi * std::max(qc, qd) + lo * std::min(qc, qd);
    }
    QTable next;
    double change = 0.0;
    for (State s : kAllStates) {
      for (Action a : kAllActions) {
        double acc = 0.0;
        for (State n : kAllStates) acc += p[index(s)][index(a)][index(n)] * cont[index(n)];
        next(s, a) = r(s, a) + d * acc;
        change = std::max(change, std::abs(next(s, a) - q(s, a)));
      }
    }
    q = next;
    if (change < tol) return greedy_strategy(q);
  }
  throw ConvergenceError("best response value iteration did not converge");
}

BestResponseNetwork::BestResponseNetwork(GameParams params, double epsilon, double delta,
                                         std::array<StrategyPair, StrategyPair::kCount> successors)
    : params_(params), epsilon_(epsilon), delta_(delta), successors_(successors) {}

std::string BestResponseNetwork::to_dot() const {
  std::ostringstream out;
  out << "digraph mbrn {\n";
  for (int i = 0; i < StrategyPair::kCount; ++i) {
    out << "  " << i << " -> " << successors_[i].index() << ";\n";
  }
  out << "}\n";
  return out.str();
}

BestResponseNetwork build_network(const GameParams& params, ExplorationRate eps,
                                  DiscountFactor delta) {
  // Only 16 opponents per seat, so resolve those first.
  std::array<PureStrategy, PureStrategy::kCount> response_one{};
  std::array<PureStrategy, PureStrategy::kCount> response_two{};
  for (int c = 0; c < PureStrategy::kCount; ++c) {
    const PureStrategy opp = PureStrategy::from_code(c);
    response_one[c] = best_response(Seat::One, opp, params, eps, delta);
    response_two[c] = best_response(Seat::Two, opp, params, eps, delta);
  }
  std::array<StrategyPair, StrategyPair::kCount> succ{};
  for (int i = 0; i < StrategyPair::kCount; ++i) {
    const StrategyPair p = StrategyPair::from_index(i);
    succ[i] = {response_one[p.s2.code()], response_two[p.s1.code()]};
  }
  return BestResponseNetwork(params, eps.value(), delta.value(), succ);
}

bool EquilibriumSet::contains(const StrategyPair& p) const {
  return std::find(pairs.begin(), pairs.end(), p) != pairs.end();
}

EquilibriumSet find_equilibria(const BestResponseNetwork& net) {
  EquilibriumSet eq;
  for (int i = 0; i < StrategyPair::kCount; ++i) {
    const StrategyPair p = StrategyPair::from_index(i);
    if (net.successor(p) == p) eq.pairs.push_back(p);
  }
  eq.alld = eq.contains(named_pair(NamedStrategy::AllD));
  eq.gt = eq.contains(named_pair(NamedStrategy::GT));
  eq.wsls = eq.contains(named_pair(NamedStrategy::WSLS));
  return eq;
}

std::array<int, StrategyPair::kCount> attractors(const BestResponseNetwork& net) {
  std::array<int, StrategyPair::kCount> out{};
  for (int i = 0; i < StrategyPair::kCount; ++i) {
    // A chain that has not hit a fixed point within 256 steps is on a cycle.
    StrategyPair cur = StrategyPair::from_index(i);
    out[i] = -1;
    for (int step = 0; step <= StrategyPair::kCount; ++step) {
      const StrategyPair next = net.successor(cur);
      if (next == cur) {
        out[i] = cur.index();
        break;
      }
      cur = next;
    }
  }
  return out;
}

BasinFraction basin_fraction(const BestResponseNetwork& net, const StrategyPair& eq) {
  if (!(net.successor(eq) == eq)) {
    throw ValidationError("strategy pair " + describe(eq) + " is not an equilibrium");
  }
  const auto reach = attractors(net);
  return {static_cast<int>(std::count(reach.begin(), reach.end(), eq.index()))};
}

double wsls_threshold(const GameParams& params, double epsilon) {
  const double t = params.temptation();
  const double s = params.sucker();
  const double keep = 1.0 - epsilon;
  return (2.0 * (t - 1.0) + epsilon * (1.0 - s - t)) / (2.0 * keep * keep);
}

bool wsls_stable(const GameParams& params, double epsilon, double delta) {
  return delta > wsls_threshold(params, epsilon);
}

DeltaInterval gt_bounds(const GameParams& params, double epsilon) {
  const double t = params.temptation();
  const double s = params.sucker();
  const double e = epsilon;
  const double upper = (2.0 * s + e * (1.0 - s - t)) / ((1.0 - e) * ((2.0 - e) * s - e * t));
  const double lower = (2.0 * (t - 1.0) + e * (1.0 - s - t)) / ((1.0 - e) * (2.0 * t - e * (s + t)));
  return {lower, upper};
}

bool gt_stable(const GameParams& params, double epsilon, double delta) {
  const DeltaInterval b = gt_bounds(params, epsilon);
  return b.upper > delta && delta > b.lower;
}

std::string_view to_string(PhaseMode mode) {
  return mode == PhaseMode::Analytic ? "analytic" : "network";
}

StabilityRegion phase_diagram(const GameParams& params, const std::vector<double>& epsilon_grid,
                              const std::vector<double>& delta_grid, PhaseMode mode,
                              unsigned workers) {
  StabilityRegion region{params, mode, epsilon_grid, delta_grid, {}};
  region.cells.resize(epsilon_grid.size() * delta_grid.size());
  const StrategyPair tft = named_pair(NamedStrategy::TfT);
  parallel_for(region.cells.size(), workers, [&](std::size_t k) {
    const double e = epsilon_grid[k / delta_grid.size()];
    const double d = delta_grid[k % delta_grid.size()];
    PhaseCell cell{e, d, true, false, false, false};
    if (mode == PhaseMode::Analytic) {
      cell.gt = gt_stable(params, e, d);
      cell.wsls = wsls_stable(params, e, d);
    } else {
      const BestResponseNetwork net = build_network(params, ExplorationRate(e), DiscountFactor(d));
      const EquilibriumSet eq = find_equilibria(net);
      cell.alld = eq.alld;
      cell.gt = eq.gt;
      cell.wsls = eq.wsls;
      cell.tft = eq.contains(tft);
    }
    region.cells[k] = cell;
  });
  return region;
}

namespace {

std::vector<double> evenly_spaced(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return out;
}

}  // namespace

BasinSweepSpec BasinSweepSpec::standard(int points) {
  return {evenly_spaced(1.05, 2.0, points), evenly_spaced(-1.0, -0.05, points),
          evenly_spaced(0.001, 0.3, points), evenly_spaced(0.5, 0.999, points)};
}

BasinSweepResult max_wsls_basin(const BasinSweepSpec& spec, unsigned workers) {
  const std::size_t n_s = spec.suckers.size();
  const std::size_t n_e = spec.epsilons.size();
  const std::size_t n_d = spec.deltas.size();
  std::vector<BasinSweepPoint> points(spec.size());
  const StrategyPair wsls = named_pair(NamedStrategy::WSLS);

  parallel_for(points.size(), workers, [&](std::size_t k) {
    const std::size_t id = k % n_d;
    const std::size_t ie = (k / n_d) % n_e;
    const std::size_t is = (k / (n_d * n_e)) % n_s;
    const std::size_t it = k / (n_d * n_e * n_s);
    const GameParams params(spec.temptations[it], spec.suckers[is]);
    const double e = spec.epsilons[ie];
    const double d = spec.deltas[id];
    const BestResponseNetwork net = build_network(params, ExplorationRate(e), DiscountFactor(d));
    BasinFraction basin{};
    if (net.successor(wsls) == wsls) basin = basin_fraction(net, wsls);
    points[k] = {params.temptation(), params.sucker(), e, d, basin};
  });

  BasinSweepResult result;
  result.cells = points.size();
  for (const BasinSweepPoint& p : points) {
    if (p.wsls_basin.count > 0) ++result.wsls_cells;
    result.max_basin.count = std::max(result.max_basin.count, p.wsls_basin.count);
  }
  for (const BasinSweepPoint& p : points) {
    if (p.wsls_basin.count == result.max_basin.count && p.wsls_basin.count > 0) {
      result.attaining.push_back(p);
    }
  }
  return result;
}

}  // namespace ipdrl
