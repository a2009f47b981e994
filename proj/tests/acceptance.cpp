// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "ipdrl/config.hpp"
#include "ipdrl/dynamics.hpp"
#include "ipdrl/exact_eval.hpp"
#include "ipdrl/harness.hpp"
#include "ipdrl/learners.hpp"
#include "ipdrl/mbrn.hpp"
#include "ipdrl/random.hpp"

using namespace ipdrl;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ExperimentConfig preset(const std::string& name) {
  return load_config(fs::path(IPDRL_CONFIG_DIR) / (name + ".cfg"));
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

Verdict analytic_thresholds() {
  const GameParams a(1.5, -0.2);
  const double w = wsls_threshold(a, 0.01);
  bool ok = std::abs(w - 0.50862) <= 1e-5;
  std::string detail = fmt("wsls_threshold(T=1.5,S=-0.2,eps=0.01)=%.7f", w);
  for (const GameParams& g : {a, GameParams(1.25, -0.25)}) {
    const double t = g.temptation();
    const DeltaInterval gt = gt_bounds(g, 0.0);
    const bool exact = wsls_threshold(g, 0.0) == t - 1.0 && gt.lower == (t - 1.0) / t && gt.upper == 1.0;
    ok = ok && exact;
    detail += fmt("; T=%g eps=0: wsls>%.17g gt in (%.17g, %.17g)%s", t, wsls_threshold(g, 0.0),
                  gt.lower, gt.upper, exact ? "" : " MISMATCH");
  }
  return {ok, detail};
}

Verdict cross_validation() {
  const auto eps = linspace(0.0, 0.6, 30);
  const auto del = linspace(0.0, 0.995, 30);
  bool ok = true;
  std::string detail;
  for (const GameParams& g : {GameParams(1.5, -0.2), GameParams(1.25, -0.25)}) {
    const auto an = phase_diagram(g, eps, del, PhaseMode::Analytic);
    const auto nw = phase_diagram(g, eps, del, PhaseMode::Network);
    auto same = [](const PhaseCell& x, const PhaseCell& y) {
      return x.alld == y.alld && x.gt == y.gt && x.wsls == y.wsls;
    };
    int agree = 0;
    int off_boundary = 0;
    for (std::size_t ie = 0; ie < eps.size(); ++ie) {
      for (std::size_t id = 0; id < del.size(); ++id) {
        if (same(an.at(ie, id), nw.at(ie, id))) {
          ++agree;
          continue;
        }
        bool adjacent = false;
        for (int de = -1; de <= 1; ++de) {
          for (int dd = -1; dd <= 1; ++dd) {
            const long je = static_cast<long>(ie) + de;
            const long jd = static_cast<long>(id) + dd;
            if (je < 0 || jd < 0 || je >= 30 || jd >= 30) continue;
            adjacent = adjacent || !same(an.at(ie, id), an.at(je, jd));
          }
        }
        off_boundary += !adjacent;
      }
    }
    const double frac = agree / 900.0;
    ok = ok && frac >= 0.99 && off_boundary == 0;
    detail += fmt("%sT=%g S=%g: agreement %.4f, off-boundary disagreements %d",
                  detail.empty() ? "" : "; ", g.temptation(), g.sucker(), frac, off_boundary);
  }
  return {ok, detail};
}

Verdict basin_maximum() {
  const auto spec = BasinSweepSpec::standard(20);
  const auto res = max_wsls_basin(spec);
  return {res.max_basin.count == 4,
          fmt("max WSLS basin %d/256 = %.6f over %zu cells (%zu with WSLS stable, %zu attaining)",
              res.max_basin.count, res.max_basin.value(), res.cells, res.wsls_cells,
              res.attaining.size())};
}

Verdict tft_negative() {
  int tft = 0;
  std::size_t cells = 0;
  for (const char* name : {"fig2a", "fig2b"}) {
    const ExperimentConfig c = preset(name);
    const auto r = phase_diagram(GameParams(c.temptation, c.sucker), c.epsilons, c.deltas,
                                 PhaseMode::Network);
    for (const auto& cell : r.cells) tft += cell.tft;
    cells += r.cells.size();
  }
  return {tft == 0, fmt("(TfT, TfT) self-loop in %d of %zu cells", tft, cells)};
}

MixedStrategy random_mixed(Rng& rng) {
  MixedStrategy x;
  for (State s : kAllStates) {
    const double p = rng.uniform();
    x.probs[index(s)] = {p, 1.0 - p};
  }
  return x;
}

Verdict exact_eval_oracle() {
  const GameParams g(1.5, -0.2);
  const double delta = 0.95;
  const int horizon = static_cast<int>(std::ceil(std::log(1e-6) / std::log(delta)));
  const int rollouts = 100'000;
  Rng rng = seed_stream(20, {0});
  int cases = 0;
  int within = 0;
  double max_residual = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const JointStrategy js{random_mixed(rng), random_mixed(rng)};
    const auto v = state_values(js, g, DiscountFactor(delta));
    const auto p = joint_transition(js);
    const auto r = average_state_reward(js, g);
    for (int i = 0; i < 2; ++i) {
      for (int s = 0; s < kNumStates; ++s) {
        double pv = 0.0;
        for (int z = 0; z < kNumStates; ++z) pv += p[s][z] * v[i][z];
        max_residual = std::max(max_residual, std::abs(v[i][s] - r[i][s] - delta * pv));
      }
    }
    std::array<std::array<double, kNumStates>, kNumStates> cdf{};
    std::array<RewardPair, kNumStates> pay{};
    for (int s = 0; s < kNumStates; ++s) {
      double acc = 0.0;
      for (int z = 0; z < kNumStates; ++z) {
        acc += p[s][z];
        cdf[s][z] = acc;
      }
      cdf[s][kNumStates - 1] = 1.0;
      pay[s] = reward_of_state(g, static_cast<State>(s));
    }
    for (int start = 0; start < kNumStates; ++start) {
      std::array<double, 2> sum{};
      std::array<double, 2> sum_sq{};
      for (int k = 0; k < rollouts; ++k) {
        int s = start;
        double w = 1.0;
        std::array<double, 2> ret{};
        for (int t = 0; t < horizon; ++t) {
          const double u = rng.uniform();
          int z = 0;
          while (u >= cdf[s][z]) ++z;
          ret[0] += w * pay[z][0];
          ret[1] += w * pay[z][1];
          w *= delta;
          s = z;
        }
        for (int i = 0; i < 2; ++i) {
          sum[i] += ret[i];
          sum_sq[i] += ret[i] * ret[i];
        }
      }
      for (int i = 0; i < 2; ++i) {
        const double mean = sum[i] / rollouts;
        const double se = std::sqrt(std::max(0.0, sum_sq[i] / rollouts - mean * mean) / rollouts);
        ++cases;
        within += std::abs(mean - v[i][start]) <= 3.0 * se;
      }
    }
  }
  const double frac = static_cast<double>(within) / cases;
  return {frac >= 0.99 && max_residual <= 1e-8,
          fmt("%d/%d (strategy, state, seat) cases within 3 SE (%.4f), horizon %d, "
              "max Bellman residual %.2e",
              within, cases, frac, horizon, max_residual)};
}

Verdict learnability() {
  LearnabilitySpec spec{GameParams(1.5, -0.2), 0.99, {0.05}, {0.05}, 250, 1, std::nullopt, {}};
  const auto low = learnability_sweep(spec).front();
  spec.alphas = {0.5};
  spec.epsilons = {0.5};
  const auto high = learnability_sweep(spec).front();
  const double wsls = low.fraction(Outcome::WSLS);
  const double alld = high.fraction(Outcome::AllD);
  const Interval wi = wilson_interval(low.counts[static_cast<int>(Outcome::WSLS)], low.n);
  const Interval ai = wilson_interval(high.counts[static_cast<int>(Outcome::AllD)], high.n);
  return {wsls >= 0.25 && wsls <= 0.65 && alld > 0.5,
          fmt("alpha=eps=0.05: WSLS %.3f [%.3f, %.3f] (nonconvergent %.3f); "
              "alpha=eps=0.5: AllD %.3f [%.3f, %.3f]",
              wsls, wi.lo, wi.hi, low.fraction(Outcome::NonConvergent), alld, ai.lo, ai.hi)};
}

Verdict batch_consistency() {
  const GameParams g(1.5, -0.2);
  const double delta = 0.9;
  const double eps = 0.2;
  const std::int64_t k = 1'000'000;
  const int reps = 30;
  // Frozen pair whose exact state-action values keep it greedy, so the
  // running value estimates start and stay at their own fixed point.
  std::optional<JointQ> start;
  std::string pair_name;
  for (NamedStrategy n : {NamedStrategy::WSLS, NamedStrategy::GT, NamedStrategy::AllD}) {
    const StrategyPair pair = named_pair(n);
    const JointStrategy js = make_joint_strategy(pair, ExplorationRate(eps));
    const JointQ jq{state_action_quality(Seat::One, js, g, DiscountFactor(delta)),
                    state_action_quality(Seat::Two, js, g, DiscountFactor(delta))};
    if (jq.greedy_pair() == pair) {
      start = jq;
      pair_name = std::string(to_string(n));
      break;
    }
  }
  if (!start) return {false, "no named pair is greedy in its own values"};
  const double alpha = 0.5;
  const JointQ det_target =
      deterministic_step(*start, g, LearningRate(1.0), ExplorationRate(eps), DiscountFactor(delta));
  const JointQ det_step =
      deterministic_step(*start, g, LearningRate(alpha), ExplorationRate(eps), DiscountFactor(delta));
  const LearnerParams lp{LearningRate(alpha), ExplorationRate(eps), DiscountFactor(delta)};
  std::array<std::array<double, 16>, 2> sum{}, sum_sq{}, step_sum{}, step_sq{};
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng = seed_stream(30, {static_cast<std::uint64_t>(rep)});
    BatchLearner a1(start->q1, lp, k);
    BatchLearner a2(start->q2, lp, k);
    batch_interact(a1, a2, g, sample_initial_state(rng), k, rng);
    const QTable t1 = a1.batch_target();
    const QTable t2 = a2.batch_target();
    a1.adapt();
    a2.adapt();
    for (int e = 0; e < 8; ++e) {
      const State s = static_cast<State>(e / 2);
      const Action a = static_cast<Action>(e % 2);
      const double x[4] = {t1(s, a), t2(s, a), a1.q_act()(s, a), a2.q_act()(s, a)};
      sum[0][e] += x[0];
      sum_sq[0][e] += x[0] * x[0];
      sum[1][e] += x[1];
      sum_sq[1][e] += x[1] * x[1];
      step_sum[0][e] += x[2];
      step_sq[0][e] += x[2] * x[2];
      step_sum[1][e] += x[3];
      step_sq[1][e] += x[3] * x[3];
    }
  }
  double worst_target = 0.0;
  double worst_step = 0.0;
  auto z_score = [&](double s, double sq, double expected) {
    const double mean = s / reps;
    const double var = std::max(0.0, (sq - reps * mean * mean) / (reps - 1));
    const double se = std::sqrt(var / reps);
    return se > 0.0 ? std::abs(mean - expected) / se : (mean == expected ? 0.0 : INFINITY);
  };
  for (int i = 0; i < 2; ++i) {
    const QTable& dt = i == 0 ? det_target.q1 : det_target.q2;
    const QTable& ds = i == 0 ? det_step.q1 : det_step.q2;
    for (int e = 0; e < 8; ++e) {
      const State s = static_cast<State>(e / 2);
      const Action a = static_cast<Action>(e % 2);
      worst_target = std::max(worst_target, z_score(sum[i][e], sum_sq[i][e], dt(s, a)));
      worst_step = std::max(worst_step, z_score(step_sum[i][e], step_sq[i][e], ds(s, a)));
    }
  }
  return {worst_target <= 5.0 && worst_step <= 5.0,
          fmt("frozen %s pair, delta=%.2f eps=%.2f, K=%lld, %d replicates: worst |z| target %.2f, "
              "after one adaptation (alpha=%.1f) %.2f",
              pair_name.c_str(), delta, eps, static_cast<long long>(k), reps, worst_target, alpha,
              worst_step)};
}

Verdict fig4a() {
  const ExperimentConfig c = preset("fig4a");
  const BatchExperiment e{GameParams(c.temptation, c.sucker),
                          c.alpha,
                          c.epsilon,
                          c.delta,
                          c.batch_size,
                          c.steps,
                          100,
                          c.seed,
                          0,
                          InitRange{c.init_low, c.effective_init_high()}};
  const auto recs = batch_trajectory(e);
  const TrajectoryRecord& r = recs.back();
  return {r.frac_wsls >= 0.6 && r.frac_wsls > r.frac_gt && r.frac_wsls > r.frac_alld,
          fmt("t=%lld: WSLS %.2f [%.3f, %.3f], GT %.2f [%.3f, %.3f], AllD %.2f [%.3f, %.3f], other %.2f",
              static_cast<long long>(r.t), r.frac_wsls, r.wsls.lo, r.wsls.hi, r.frac_gt, r.gt.lo,
              r.gt.hi, r.frac_alld, r.alld.lo, r.alld.hi, r.frac_other)};
}

Verdict online_substitute() {
  const ExperimentConfig c = preset("fig1b");
  const OnlineExperiment e{GameParams(c.temptation, c.sucker),
                           c.alpha,
                           c.epsilon,
                           c.delta,
                           2'000'000,
                           c.stride,
                           c.window,
                           50,
                           c.seed,
                           InitRange{c.init_low, c.effective_init_high()}};
  const auto recs = online_trajectory(e);
  const auto at = std::find_if(recs.begin(), recs.end(), [](const auto& r) { return r.t == 100'000; });
  if (at == recs.end()) return {false, "no snapshot at t = 100000"};
  const TrajectoryRecord& end = recs.back();
  const bool ok = *end.coop_rate > *at->coop_rate && end.frac_wsls > end.frac_gt &&
                  end.frac_wsls > end.frac_alld;
  return {ok, fmt("coop %.3f at t=1e5 -> %.3f at t=%lld; WSLS %.2f [%.3f, %.3f], GT %.2f [%.3f, %.3f], "
                  "AllD %.2f [%.3f, %.3f]",
                  *at->coop_rate, *end.coop_rate, static_cast<long long>(end.t), end.frac_wsls,
                  end.wsls.lo, end.wsls.hi, end.frac_gt, end.gt.lo, end.gt.hi, end.frac_alld,
                  end.alld.lo, end.alld.hi)};
}

Verdict algorithm_contracts() {
  const GameParams g(1.5, -0.2);
  const LearnerParams lp{LearningRate(0.3), ExplorationRate(0.1), DiscountFactor(0.99)};
  const std::int64_t k = 4096;
  Rng rng = seed_stream(40, {0});
  const InitRange init = InitRange::standard(DiscountFactor(0.99));
  const JointQ q0 = random_joint_q(rng, init);
  BatchLearner a1(q0.q1, lp, k);
  BatchLearner a2(q0.q2, lp, k);
  State s = sample_initial_state(rng);
  int failures = 0;
  for (int b = 0; b < 50; ++b) {
    s = batch_interact(a1, a2, g, s, k, rng);
    for (const BatchLearner* a : {&a1, &a2}) {
      failures += a->model().total_visits() != k || !a->model().consistent();
    }
    a1.adapt();
    a2.adapt();
    for (const BatchLearner* a : {&a1, &a2}) {
      failures += !(a->q_val() == a->q_act()) || !a->model().empty();
    }
  }
  BatchLearner probe(q0.q1, lp, k);
  int bad_steps = 0;
  for (State z : kAllStates) {
    for (Action a : kAllActions) {
      for (int n = 1; n <= 20; ++n) {
        bad_steps += probe.observe(z, a, 1.0, State::CC) != 1.0 / (n + 1);
      }
    }
  }
  return {failures == 0 && bad_steps == 0,
          fmt("50 batches x 2 learners: %d contract violations (sum n == K, q_val == q_act, "
              "model cleared); step-size sequence mismatches %d of 160",
              failures, bad_steps)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  ExperimentConfig c;
  c.alpha = 0.3;
  c.epsilon = 0.1;
  c.delta = 0.99;
  c.batch_size = 1000;
  c.samples = 16;
  c.steps = 40'000;
  c.seed = 7;
  c.epsilons = {0.01, 0.1, 0.3};
  c.deltas = {0.5, 0.9, 0.99};
  c.alphas = {0.05, 0.5};
  c.batch_sizes = {1000, 2000};
  c.robust_alphas = {0.1, 0.3};
  c.robust_epsilons = {0.1, 0.2};
  c.phase_mode = PhaseModeSelection::Both;
  c.basin_points = 3;
  const fs::path root = fs::temp_directory_path() / "ipdrl_acceptance_determinism";
  fs::remove_all(root);
  int compared = 0;
  std::string mismatched;
  for (ExperimentKind kind : {ExperimentKind::Phase, ExperimentKind::Mbrn, ExperimentKind::Learnability,
                              ExperimentKind::Online, ExperimentKind::Batch, ExperimentKind::Robustness}) {
    std::vector<fs::path> dirs;
    for (unsigned w : {1u, 4u, 1u}) {
      c.workers = w;
      const fs::path d = root / (std::string(to_string(kind)) + "_" + std::to_string(dirs.size()));
      fs::create_directories(d);
      const auto res = run_experiment(c, kind, d);
      dirs.push_back(d);
      for (const auto& f : res.files) {
        if (f == "summary.json" || dirs.size() == 1) continue;
        ++compared;
        if (slurp(dirs.front() / f) != slurp(d / f)) mismatched += " " + f;
      }
    }
  }
  fs::remove_all(root);
  return {mismatched.empty(),
          fmt("%d output files compared across runs with 1, 4 and 1 workers%s%s", compared,
              mismatched.empty() ? "" : "; differing:", mismatched.c_str())};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"analytic-thresholds", analytic_thresholds},
      {"analytic-network-cross-validation", cross_validation},
      {"wsls-basin-maximum", basin_maximum},
      {"tft-not-equilibrium", tft_negative},
      {"exact-evaluation-oracle", exact_eval_oracle},
      {"learnability", learnability},
      {"batch-deterministic-consistency", batch_consistency},
      {"batch-wsls-headline", fig4a},
      {"online-cooperation-substitute", online_substitute},
      {"batch-learner-contracts", algorithm_contracts},
      {"determinism", determinism},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !v.pass;
  }
  return failed == 0 ? 0 : 1;
}
