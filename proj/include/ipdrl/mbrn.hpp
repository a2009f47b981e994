#pragma once

// Mutual best-response networks over the 256 pure strategy pairs, their
// self-loop equilibria and basins, and the closed-form stability conditions
// for WSLS and GT.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "ipdrl/exact_eval.hpp"
#include "ipdrl/strategies.hpp"

namespace ipdrl {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Epsilon-greedy best response of `seat` against an opponent playing the
/// epsilon-greedy version of `opponent`.
///
/// The own exploration is part of the continuation: the result is the
/// greedy strategy of the fixed point of
///   q(s,a) = r(s,a) + delta * sum_s' p(s'|a,s) [(1-eps/2) max_b q(s',b) + (eps/2) min_b q(s',b)].
/// Solved by policy iteration on the 16 pure strategies (exact evaluation
/// per iterate). Ties resolve to D.
PureStrategy best_response(Seat seat, PureStrategy opponent, const GameParams& params,
                           ExplorationRate eps, DiscountFactor delta);

/// Same fixed point computed by plain value iteration until the sup-norm
/// update falls below `tol`. Throws ConvergenceError past `max_iterations`.
PureStrategy best_response_value_iteration(Seat seat, PureStrategy opponent,
                                           const GameParams& params, ExplorationRate eps,
                                           DiscountFactor delta, double tol = 1e-10,
                                           long max_iterations = 1'000'000);

class BestResponseNetwork {
 public:
  BestResponseNetwork(GameParams params, double epsilon, double delta,
                      std::array<StrategyPair, StrategyPair::kCount> successors);

  StrategyPair successor(const StrategyPair& p) const { return successors_[p.index()]; }
  const GameParams& params() const { return params_; }
  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

  /// Graphviz rendering; node label = pair index, one edge per node.
  std::string to_dot() const;

 private:
  GameParams params_;
  double epsilon_;
  double delta_;
  std::array<StrategyPair, StrategyPair::kCount> successors_;
};

/// Successor of (s1, s2) is (best_response(One, s2), best_response(Two, s1)).
BestResponseNetwork build_network(const GameParams& params, ExplorationRate eps,
                                  DiscountFactor delta);

struct EquilibriumSet {
  std::vector<StrategyPair> pairs;  // ascending by index
  bool alld = false;
  bool gt = false;
  bool wsls = false;

  bool contains(const StrategyPair& p) const;
};

EquilibriumSet find_equilibria(const BestResponseNetwork& net);

/// k / 256 as an exact count.
struct BasinFraction {
  int count = 0;
  static constexpr int kTotal = StrategyPair::kCount;

  double value() const { return static_cast<double>(count) / kTotal; }
  friend bool operator==(const BasinFraction&, const BasinFraction&) = default;
};

/// For every node, the index of the self-loop its successor chain reaches,
/// or -1 when the chain ends on a longer cycle.
std::array<int, StrategyPair::kCount> attractors(const BestResponseNetwork& net);

/// Throws ValidationError when `eq` is not a self-loop of `net`.
BasinFraction basin_fraction(const BestResponseNetwork& net, const StrategyPair& eq);

/// Lower bound on delta for WSLS to be a mutual best response.
double wsls_threshold(const GameParams& params, double epsilon);
bool wsls_stable(const GameParams& params, double epsilon, double delta);

/// GT is stable for lower < delta < upper.
struct DeltaInterval {
  double lower;
  double upper;
};
DeltaInterval gt_bounds(const GameParams& params, double epsilon);
bool gt_stable(const GameParams& params, double epsilon, double delta);

enum class PhaseMode { Analytic, Network };
std::string_view to_string(PhaseMode mode);

struct PhaseCell {
  double epsilon;
  double delta;
  bool alld;
  bool gt;
  bool wsls;
  bool tft;  // network mode only; always false in analytic mode
};

/// Cells are stored epsilon-major: cells[ie * delta_grid.size() + id].
struct StabilityRegion {
  GameParams params;
  PhaseMode mode;
  std::vector<double> epsilon_grid;
  std::vector<double> delta_grid;
  std::vector<PhaseCell> cells;

  const PhaseCell& at(std::size_t ie, std::size_t id) const {
    return cells[ie * delta_grid.size() + id];
  }
};

StabilityRegion phase_diagram(const GameParams& params, const std::vector<double>& epsilon_grid,
                              const std::vector<double>& delta_grid, PhaseMode mode,
                              unsigned workers = 0);

/// Parameter grid for the WSLS basin maximisation.
struct BasinSweepSpec {
  std::vector<double> temptations;
  std::vector<double> suckers;
  std::vector<double> epsilons;
  std::vector<double> deltas;

  /// T in [1.05, 2], S in [-1, -0.05], eps in [0.001, 0.3], delta in [0.5, 0.999],
  /// `points` evenly spaced values each.
  static BasinSweepSpec standard(int points = 20);
  std::size_t size() const {
    return temptations.size() * suckers.size() * epsilons.size() * deltas.size();
  }
};

struct BasinSweepPoint {
  double temptation;
  double sucker;
  double epsilon;
  double delta;
  BasinFraction wsls_basin;
};

struct BasinSweepResult {
  BasinFraction max_basin;
  std::vector<BasinSweepPoint> attaining;  // every grid point at the maximum
  std::size_t cells = 0;
  std::size_t wsls_cells = 0;  // cells where WSLS is an equilibrium
};

BasinSweepResult max_wsls_basin(const BasinSweepSpec& spec, unsigned workers = 0);

}  // namespace ipdrl
