#include <gtest/gtest.h>

#include <random>

#include "ipdrl/learners.hpp"

using namespace ipdrl;

namespace {

const GameParams kFig2a(1.5, -0.2);

LearnerParams params(double alpha, double eps, double delta) {
  return {LearningRate(alpha), ExplorationRate(eps), DiscountFactor(delta)};
}

QTable random_q(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(-1.0, 10.0);
  QTable q;
  for (State s : kAllStates) {
    for (Action a : kAllActions) q(s, a) = u(gen);
  }
  return q;
}

QTable margin_q(PureStrategy sigma, double margin) {
  QTable q;
  for (State s : kAllStates) {
    q(s, sigma.action(s)) = margin;
    q(s, other(sigma.action(s))) = 0.0;
  }
  return q;
}

}  // namespace

TEST(OnlineLearner, UpdateArithmetic) {
  QTable q;
  q(State::DD, Action::C) = 2.0;
  q(State::DD, Action::D) = 2.0;
  OnlineLearner l(q, params(0.1, 0.1, 0.98));
  l.update(State::CC, Action::C, 1.0, State::DD);
  EXPECT_NEAR(l.q()(State::CC, Action::C), 0.296, 1e-15);
}

TEST(OnlineLearner, UpdateTouchesOneEntry) {
  std::mt19937_64 gen(61);
  for (int trial = 0; trial < 200; ++trial) {
    const QTable q = random_q(gen);
    OnlineLearner l(q, params(0.3, 0.2, 0.9));
    const State s = static_cast<State>(gen() % 4);
    const Action a = static_cast<Action>(gen() % 2);
    l.update(s, a, 0.7, static_cast<State>(gen() % 4));
    int changed = 0;
    for (State z : kAllStates) {
      for (Action b : kAllActions) changed += l.q()(z, b) != q(z, b);
    }
    EXPECT_LE(changed, 1);
    for (State z : kAllStates) {
      for (Action b : kAllActions) {
        if (z != s || b != a) {
          EXPECT_EQ(l.q()(z, b), q(z, b));
        }
      }
    }
  }
}

TEST(OnlineLearner, BootstrapUsesPreUpdatePolicy) {
  QTable q;
  q(State::CC, Action::C) = 1.0;
  q(State::CC, Action::D) = 0.0;
  OnlineLearner l(q, params(1.0, 0.2, 0.5));
  // Self-transition: the bootstrap reads x and q at CC before the write.
  l.update(State::CC, Action::C, 0.0, State::CC);
  EXPECT_NEAR(l.q()(State::CC, Action::C), 0.5 * (0.9 * 1.0 + 0.1 * 0.0), 1e-15);
}

TEST(OnlineRun, WslsFixedPointCooperatesForever) {
  const JointStrategy js = make_joint_strategy(named_pair(NamedStrategy::WSLS), ExplorationRate(0.0));
  OnlineLearner a(state_action_quality(Seat::One, js, kFig2a, DiscountFactor(0.98)), params(0.1, 0.0, 0.98));
  OnlineLearner b(state_action_quality(Seat::Two, js, kFig2a, DiscountFactor(0.98)), params(0.1, 0.0, 0.98));
  Rng rng = seed_stream(1, {0});
  const auto snaps = run_online_learning(a, b, kFig2a, {5000, 1000, 1000, State::CC}, rng);
  ASSERT_EQ(snaps.size(), 5u);
  for (const auto& s : snaps) {
    EXPECT_EQ(s.coop_rate, 1.0);
    EXPECT_EQ(s.greedy_pair, named_pair(NamedStrategy::WSLS));
  }
}

TEST(OnlineRun, ShortWindowAtStartAndFinalSnapshot) {
  OnlineLearner a(margin_q(named_strategy(NamedStrategy::AllD), 5.0), params(0.1, 0.0, 0.5));
  OnlineLearner b(margin_q(named_strategy(NamedStrategy::AllD), 5.0), params(0.1, 0.0, 0.5));
  Rng rng = seed_stream(2, {0});
  const auto snaps = run_online_learning(a, b, kFig2a, {25, 10, 1000, State::CC}, rng);
  ASSERT_EQ(snaps.size(), 3u);
  EXPECT_EQ(snaps[0].t, 10);
  EXPECT_EQ(snaps[2].t, 25);
  for (const auto& s : snaps) EXPECT_EQ(s.coop_rate, 0.0);

  OnlineLearner c(margin_q(PureStrategy::from_code(15), 50.0), params(0.01, 0.0, 0.5));
  OnlineLearner d(margin_q(PureStrategy::from_code(15), 50.0), params(0.01, 0.0, 0.5));
  const auto coop = run_online_learning(c, d, kFig2a, {10, 10, 1000, State::DD}, rng);
  EXPECT_EQ(coop[0].coop_rate, 1.0);  // ten steps, all (C, C), window not yet full
}

TEST(OnlineRun, SameSeedSameTrajectory) {
  std::mt19937_64 gen(62);
  const QTable q1 = random_q(gen);
  const QTable q2 = random_q(gen);
  auto run = [&] {
    OnlineLearner a(q1, params(0.1, 0.1, 0.9));
    OnlineLearner b(q2, params(0.1, 0.1, 0.9));
    Rng rng = seed_stream(3, {4, 5});
    auto snaps = run_online_learning(a, b, kFig2a, {20000, 500, 1000, std::nullopt}, rng);
    return std::make_pair(a.q(), snaps.back().coop_rate);
  };
  EXPECT_EQ(run(), run());
}

TEST(BatchLearner, StepSizesFollowVisitCounts) {
  std::mt19937_64 gen(63);
  BatchLearner l(random_q(gen), params(0.3, 0.1, 0.9), 100);
  for (int m = 1; m <= 10; ++m) {
    EXPECT_DOUBLE_EQ(l.observe(State::DC, Action::D, 0.0, State::CC), 1.0 / (m + 1));
  }
  EXPECT_DOUBLE_EQ(l.observe(State::CC, Action::C, 1.0, State::CC), 0.5);
  EXPECT_EQ(l.model().visits[index(State::DC)][index(Action::D)], 10);
}

TEST(BatchLearner, EqualWeightingWithFixedBootstrap) {
  std::mt19937_64 gen(64);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  const QTable q0 = random_q(gen);
  BatchLearner l(q0, params(0.3, 0.1, 0.0), 1000);
  double sum = q0(State::CD, Action::C);
  const int m = 37;
  for (int k = 0; k < m; ++k) {
    const double r = u(gen);
    sum += r;
    l.observe(State::CD, Action::C, r, static_cast<State>(k % 4));
  }
  EXPECT_NEAR(l.q_val()(State::CD, Action::C), sum / (m + 1), 1e-12);
}

TEST(BatchLearner, InteractionLeavesPolicyFrozenAndCountsConsistent) {
  std::mt19937_64 gen(65);
  const LearnerParams p = params(0.3, 0.2, 0.9);
  BatchLearner a(random_q(gen), p, 500);
  BatchLearner b(random_q(gen), p, 500);
  const QTable qa = a.q_act();
  const auto xa = a.policy().probs;
  Rng rng = seed_stream(4, {0});
  batch_interact(a, b, kFig2a, State::CC, 500, rng);
  EXPECT_EQ(a.q_act(), qa);
  EXPECT_EQ(a.policy().probs, xa);
  EXPECT_EQ(a.model().total_visits(), 500);
  EXPECT_EQ(b.model().total_visits(), 500);
  EXPECT_TRUE(a.model().consistent());
  EXPECT_TRUE(b.model().consistent());
}

TEST(BatchLearner, AdaptationFollowsEntryOrder) {
  std::mt19937_64 gen(66);
  const LearnerParams p = params(0.3, 0.2, 0.9);
  BatchLearner a(random_q(gen), p, 300);
  BatchLearner b(random_q(gen), p, 300);
  Rng rng = seed_stream(5, {0});
  batch_interact(a, b, kFig2a, State::DD, 300, rng);

  // Oracle: Algorithm loop written out with explicit copies.
  QTable q_act = a.q_act();
  QTable q_val = a.q_val();
  MixedStrategy x = a.policy();
  const BatchModel m = a.model();
  const QTable pre_target = a.batch_target();
  bool first = true;
  for (State s : kAllStates) {
    for (Action act : kAllActions) {
      const double n = std::max<std::int64_t>(1, m.visits[index(s)][index(act)]);
      double v = 0.0;
      for (State z : kAllStates) {
        const double ev = x(Action::C, z) * q_val(z, Action::C) + x(Action::D, z) * q_val(z, Action::D);
        v += m.next_counts[index(s)][index(act)][index(z)] / n * ev;
      }
      const double target = m.reward_sums[index(s)][index(act)] / n + 0.9 * v;
      if (first) {
        EXPECT_NEAR(target, pre_target(s, act), 1e-12);
      }
      first = false;
      q_act(s, act) = 0.7 * q_act(s, act) + 0.3 * target;
      x = epsilon_greedy(q_act, p.epsilon);
      q_val(s, act) = q_act(s, act);
    }
  }
  a.adapt();
  for (State s : kAllStates) {
    for (Action act : kAllActions) EXPECT_NEAR(a.q_act()(s, act), q_act(s, act), 1e-12);
  }
  EXPECT_EQ(a.q_val(), a.q_act());
  EXPECT_TRUE(a.model().empty());
  EXPECT_EQ(a.policy().probs, epsilon_greedy(a.q_act(), p.epsilon).probs);
}

TEST(BatchLearner, UnvisitedEntriesDecay) {
  std::mt19937_64 gen(67);
  const QTable q = random_q(gen);
  BatchLearner l(q, params(0.25, 0.1, 0.9), 10);
  l.adapt();
  for (State s : kAllStates) {
    for (Action a : kAllActions) EXPECT_DOUBLE_EQ(l.q_act()(s, a), 0.75 * q(s, a));
  }
}

TEST(BatchLearner, RejectsInvalidBatchSize) {
  EXPECT_THROW(BatchLearner(QTable{}, params(0.1, 0.1, 0.9), 0), ValidationError);
}

TEST(BatchRun, AllDLockIn) {
  const PureStrategy alld = named_strategy(NamedStrategy::AllD);
  BatchLearner a(margin_q(alld, 5.0), params(0.3, 0.0, 0.9), 64);
  BatchLearner b(margin_q(alld, 5.0), params(0.3, 0.0, 0.9), 64);
  Rng rng = seed_stream(6, {0});
  const BatchRun run = run_batch_learning(a, b, kFig2a, 64 * 20 + 10, rng);
  ASSERT_EQ(run.greedy_pairs.size(), 20u);
  for (const auto& p : run.greedy_pairs) EXPECT_EQ(p, named_pair(NamedStrategy::AllD));
  EXPECT_EQ(run.final_state, State::DD);
}

TEST(BatchRun, SnapshotsPerCompletedBatchAndDeterminism) {
  std::mt19937_64 gen(68);
  const QTable q1 = random_q(gen);
  const QTable q2 = random_q(gen);
  auto run = [&] {
    BatchLearner a(q1, params(0.3, 0.1, 0.99), 1000);
    BatchLearner b(q2, params(0.3, 0.1, 0.99), 1000);
    Rng rng = seed_stream(7, {1});
    const BatchRun r = run_batch_learning(a, b, kFig2a, 20999, rng);
    EXPECT_EQ(r.greedy_pairs.size(), 20u);
    return std::make_pair(a.q_act(), b.q_act());
  };
  EXPECT_EQ(run(), run());
  BatchLearner a(q1, params(0.3, 0.1, 0.99), 1000);
  BatchLearner b(q2, params(0.3, 0.1, 0.99), 500);
  Rng rng = seed_stream(7, {1});
  EXPECT_THROW(run_batch_learning(a, b, kFig2a, 2000, rng), ValidationError);
}

TEST(SampleAction, Frequencies) {
  MixedStrategy x;
  for (auto& row : x.probs) row = {0.3, 0.7};
  Rng rng = seed_stream(8, {0});
  int c = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) c += sample_action(x, State::DC, rng) == Action::C;
  EXPECT_NEAR(static_cast<double>(c) / n, 0.3, 5 * std::sqrt(0.21 / n));
  std::array<int, 4> states{};
  for (int k = 0; k < 40000; ++k) ++states[index(sample_initial_state(rng))];
  for (int s : states) EXPECT_NEAR(s, 10000, 5 * std::sqrt(40000 * 0.1875));
}
