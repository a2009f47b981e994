#include "ipdrl/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ipdrl/kernels/step_kernel.hpp"
#include "ipdrl/parallel.hpp"

namespace ipdrl {

LearningRate::LearningRate(double alpha) : value_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ValidationError("learning rate must lie in (0, 1] (got " + std::to_string(alpha) + ")");
  }
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::WSLS:
      return "WSLS";
    case Outcome::GT:
      return "GT";
    case Outcome::AllD:
      return "AllD";
    case Outcome::Other:
      return "Other";
    case Outcome::NonConvergent:
      return "NonConvergent";
  }
  return "?";
}

Outcome classify(const StrategyPair& pair) {
  if (pair == named_pair(NamedStrategy::WSLS)) return Outcome::WSLS;
  if (pair == named_pair(NamedStrategy::GT)) return Outcome::GT;
  if (pair == named_pair(NamedStrategy::AllD)) return Outcome::AllD;
  return Outcome::Other;
}

InitRange InitRange::standard(DiscountFactor delta) {
  return {-1.0, 1.0 / (1.0 - delta.value())};
}

JointQ deterministic_step(const JointQ& jq, const GameParams& params, LearningRate alpha,
                          ExplorationRate eps, DiscountFactor delta) {
  const JointStrategy js{epsilon_greedy(jq.q1, eps), epsilon_greedy(jq.q2, eps)};
  JointQ out = jq;
  for (Seat i : kAllSeats) {
    const QTable r = average_action_reward(i, js, params);
    const QTable nextq = next_state_quality(i, js, params, delta);
    const QTable& q = jq.of(i);
    for (State s : kAllStates) {
      for (Action a : kAllActions) {
        out.of(i)(s, a) =
            q(s, a) + alpha.value() * (r(s, a) + delta.value() * nextq(s, a) - q(s, a));
      }
    }
  }
  return out;
}

namespace {

StrategyPair lane_greedy_pair(const kernels::QBatch& batch, std::size_t lane) {
  std::array<Action, kNumStates> a1{};
  std::array<Action, kNumStates> a2{};
  for (State s : kAllStates) {
    a1[index(s)] = batch.at(lane, Seat::One, s, Action::C) > batch.at(lane, Seat::One, s, Action::D)
                       ? Action::C
                       : Action::D;
    a2[index(s)] = batch.at(lane, Seat::Two, s, Action::C) > batch.at(lane, Seat::Two, s, Action::D)
                       ? Action::C
                       : Action::D;
  }
  return {PureStrategy::from_actions(a1), PureStrategy::from_actions(a2)};
}

// Per-sample bookkeeping for the stopping rule.
class ConvergenceTracker {
 public:
  explicit ConvergenceTracker(int window) : history_(static_cast<std::size_t>(window), -1) {}

  // Returns the outcome once the sample has settled.
  std::optional<Outcome> observe(const StrategyPair& pair, double change) {
    const int id = pair.index();
    stable_ = (id == last_) ? stable_ + 1 : 0;
    last_ = id;
    history_[filled_ % history_.size()] = id;
    ++filled_;
    const int window = static_cast<int>(history_.size());
    if (!(change < tolerance_)) return std::nullopt;
    if (stable_ >= window) return classify(pair);
    if (filled_ >= history_.size() && periodic()) return Outcome::Other;
    return std::nullopt;
  }

  void set_tolerance(double tol) { tolerance_ = tol; }

 private:
  // True when the last `window` pairs repeat with some period p >= 2 and
  // contain more than one distinct pair.
  bool periodic() const {
    const std::size_t w = history_.size();
    auto at = [&](std::size_t back) { return history_[(filled_ - 1 - back) % w]; };
    for (std::size_t p = 2; p <= w / 2; ++p) {
      bool ok = true;
      for (std::size_t j = 0; j + p < w && ok; ++j) ok = at(j) == at(j + p);
      if (!ok) continue;
      for (std::size_t j = 1; j < p; ++j) {
        if (at(j) != at(0)) return true;
      }
    }
    return false;
  }

  std::vector<int> history_;
  std::size_t filled_ = 0;
  int last_ = -1;
  int stable_ = 0;
  double tolerance_ = 1e-9;
};

}  // namespace

std::vector<DynamicsOutcome> run_many_to_convergence(const std::vector<JointQ>& starts,
                                                     const GameParams& params, LearningRate alpha,
                                                     ExplorationRate eps, DiscountFactor delta,
                                                     const ConvergenceCriteria& criteria) {
  if (criteria.window < 1 || criteria.max_steps < 1) {
    throw ValidationError("convergence window and max_steps must be positive");
  }
  const kernels::StepParams kp{params.temptation(), params.sucker(), alpha.value(), eps.value(),
                               delta.value()};
  std::vector<DynamicsOutcome> results(starts.size());
  std::vector<ConvergenceTracker> trackers(starts.size(), ConvergenceTracker(criteria.window));
  for (auto& t : trackers) t.set_tolerance(criteria.tolerance);

  // `active[lane]` is the sample index held in that lane of `batch`.
  std::vector<std::size_t> active(starts.size());
  for (std::size_t k = 0; k < starts.size(); ++k) active[k] = k;
  kernels::QBatch batch(starts.size());
  for (std::size_t k = 0; k < starts.size(); ++k) batch.set(k, starts[k].q1, starts[k].q2);
  std::vector<double> change(batch.stride());
  std::vector<bool> done(starts.size(), false);

  for (long step = 1; step <= criteria.max_steps && !active.empty(); ++step) {
    kernels::step_batch(kp, batch, change);
    std::size_t finished = 0;
    for (std::size_t lane = 0; lane < active.size(); ++lane) {
      const std::size_t k = active[lane];
      if (done[k]) {
        ++finished;
        continue;
      }
      const auto settled = trackers[k].observe(lane_greedy_pair(batch, lane), change[lane]);
      if (settled || step == criteria.max_steps) {
        results[k] = {settled.value_or(Outcome::NonConvergent), step,
                      {batch.get(lane, Seat::One), batch.get(lane, Seat::Two)}};
        done[k] = true;
        ++finished;
      }
    }
    // Repack once a quarter of the lanes are idle.
    if (finished > 0 && finished * 4 >= active.size()) {
      std::vector<std::size_t> keep;
      for (std::size_t lane = 0; lane < active.size(); ++lane) {
        if (!done[active[lane]]) keep.push_back(lane);
      }
      kernels::QBatch packed(keep.size());
      std::vector<std::size_t> next_active(keep.size());
      for (std::size_t j = 0; j < keep.size(); ++j) {
        for (int pl = 0; pl < kernels::kPlanes; ++pl) packed.plane(pl)[j] = batch.plane(pl)[keep[j]];
        next_active[j] = active[keep[j]];
      }
      batch = std::move(packed);
      active = std::move(next_active);
      change.assign(batch.stride(), 0.0);
    }
  }
  return results;
}

DynamicsOutcome run_to_convergence(const JointQ& start, const GameParams& params,
                                   LearningRate alpha, ExplorationRate eps, DiscountFactor delta,
                                   const ConvergenceCriteria& criteria) {
  return run_many_to_convergence({start}, params, alpha, eps, delta, criteria).front();
}

JointQ random_joint_q(Rng& rng, const InitRange& range) {
  JointQ jq;
  for (Seat i : kAllSeats) {
    for (State s : kAllStates) {
      for (Action a : kAllActions) jq.of(i)(s, a) = rng.uniform(range.low, range.high);
    }
  }
  return jq;
}

std::vector<LearnabilityCell> learnability_sweep(const LearnabilitySpec& spec, unsigned workers) {
  if (spec.samples < 1) throw ValidationError("experiment.samples must be >= 1");
  const DiscountFactor delta(spec.delta);
  const InitRange init = spec.init.value_or(InitRange::standard(delta));
  std::vector<LearnabilityCell> cells(spec.alphas.size() * spec.epsilons.size());
  parallel_for(cells.size(), workers, [&](std::size_t c) {
    const double alpha = spec.alphas[c / spec.epsilons.size()];
    const double eps = spec.epsilons[c % spec.epsilons.size()];
    std::vector<JointQ> starts(static_cast<std::size_t>(spec.samples));
    for (int k = 0; k < spec.samples; ++k) {
      Rng rng = seed_stream(spec.seed, {tag(StreamTag::Learnability), c, static_cast<std::uint64_t>(k)});
      starts[k] = random_joint_q(rng, init);
    }
    const auto outcomes = run_many_to_convergence(starts, spec.params, LearningRate(alpha),
                                                  ExplorationRate(eps), delta, spec.criteria);
    LearnabilityCell cell{alpha, eps, spec.samples, {}};
    for (const auto& o : outcomes) ++cell.counts[static_cast<int>(o.label)];
    cells[c] = cell;
  });
  return cells;
}

}  // namespace ipdrl
