#include <gtest/gtest.h>

#include <map>

#include "microswim/qlearning.hpp"

using namespace microswim;
using namespace microswim::rl;

TEST(QTable, StartsAtZeroAndRejectsIllegalPairs) {
  QTable q;
  EXPECT_EQ(q.value(0, 0), 0.0);
  EXPECT_THROW(q.value(0, 1), std::out_of_range);  // DOF1- from the low corner
  EXPECT_THROW(q.set(2, 0, 1.0), std::out_of_range);
  EXPECT_THROW(q.set(0, 0, std::nan("")), std::invalid_argument);
  EXPECT_THROW(q.set(0, 0, INFINITY), std::invalid_argument);
  QTable no_null(false);
  EXPECT_FALSE(no_null.legal(0, 4));
  EXPECT_TRUE(q.legal(0, 4));
}

TEST(QUpdate, WorkedExamples) {
  QTable q;
  q_update(q, 0, 0, 1.0, 3, 0.5, 0.8);
  EXPECT_DOUBLE_EQ(q.value(0, 0), 0.5);

  QTable z;
  q_update(z, 0, 2, 0.0, 1, 0.5, 0.8);
  EXPECT_EQ(z.value(0, 2), 0.0);

  // Q(s,a) already equals r + gamma * max Q(s').
  QTable f;
  f.set(3, 1, 1.0);
  f.set(0, 0, 0.2 + 0.8 * 1.0);
  q_update(f, 0, 0, 0.2, 3, 0.5, 0.8);
  EXPECT_DOUBLE_EQ(f.value(0, 0), 1.0);
}

TEST(QUpdate, ConstantShiftCommutes) {
  // Shifting rewards by c and every Q by c / (1 - gamma) shifts the updated value by the same amount.
  QTable a, b;
  const double c = 0.7, gamma = 0.8, alpha = 0.3;
  for (int s = 0; s < 4; ++s)
    for (int act = 0; act < kNumActionIds; ++act)
      if (a.legal(s, act)) {
        a.set(s, act, 0.1 * s + 0.01 * act);
        b.set(s, act, 0.1 * s + 0.01 * act + c / (1 - gamma));
      }
  q_update(a, 0, 2, 0.05, 1, alpha, gamma);
  q_update(b, 0, 2, 0.05 + c, 1, alpha, gamma);
  EXPECT_NEAR(b.value(0, 2) - a.value(0, 2), c / (1 - gamma), 1e-12);
}

TEST(SelectAction, ExplorationIsUniform) {
  QTable q;
  q.set(0, 0, 5.0);
  Rng rng(99);
  std::map<int, int> counts;
  const int n = 10000;
  for (int i = 0; i < n; ++i) ++counts[action_id(select_action(q, 0, 1.0, rng))];
  ASSERT_EQ(counts.size(), 3u);
  double chi2 = 0;
  for (const auto& [id, k] : counts) {
    EXPECT_TRUE(q.legal(0, id));
    const double e = n / 3.0;
    chi2 += (k - e) * (k - e) / e;
  }
  EXPECT_LT(chi2, 13.8);  // p = 0.001 with 2 degrees of freedom
}

TEST(SelectAction, GreedyTieGoesToLowestId) {
  QTable q;
  Rng rng(1);
  EXPECT_EQ(action_id(select_action(q, 0, 0.0, rng)), 0);
  EXPECT_EQ(action_id(select_action(q, 2, 0.0, rng)), 1);
  q.set(2, 3, 0.1);
  EXPECT_EQ(action_id(select_action(q, 2, 0.0, rng)), 3);
}

TEST(Train, RejectsBadHyperparameters) {
  QConfig cfg;
  cfg.alpha = 0;
  EXPECT_THROW(train(EnvConfig::defaults(Model::ng), cfg), ConfigError);
  cfg = {};
  cfg.gamma = 1.0;
  EXPECT_THROW(train(EnvConfig::defaults(Model::ng), cfg), ConfigError);
}

TEST(Train, DeterministicForSeed) {
  QConfig cfg;
  cfg.seed = 5;
  const auto a = train(EnvConfig::defaults(Model::purcell), cfg);
  const auto b = train(EnvConfig::defaults(Model::purcell), cfg);
  EXPECT_EQ(a.transcript.actions(), b.transcript.actions());
  EXPECT_EQ(a.acquisition_step, b.acquisition_step);
  EXPECT_EQ(a.transcript.records.size(), 200u);
}

TEST(Train, PurcellLocksOntoSignature) {
  QConfig cfg;
  cfg.seed = 3;
  const auto res = train(EnvConfig::defaults(Model::purcell), cfg);
  ASSERT_TRUE(res.acquisition_step.has_value());
  EXPECT_LE(*res.acquisition_step, 50);
  EXPECT_GT(res.transcript.final_X(), 0.0);
}

TEST(Train, ZeroDiscountRunsWithoutError) {
  QConfig cfg;
  cfg.gamma = 0.0;
  cfg.seed = 1;
  const auto res = train(EnvConfig::defaults(Model::ng), cfg);
  EXPECT_EQ(res.transcript.records.size(), 200u);
  EXPECT_FALSE(res.acquisition_step.has_value());
}

TEST(GreedyLocked, FollowsCycle) {
  const auto sig = oracle::signature_cycle(Model::ng, ModelParams::ng_defaults(), Direction::pos_x);
  QTable q;
  Corner c = sig.start;
  for (const auto& a : sig.actions) {
    q.set(c.id(), action_id(a), 1.0);
    c = apply_action(c, a);
  }
  for (int k = 0; k < 4; ++k) EXPECT_TRUE(greedy_locked(q, k, sig));
  q.set(1, action_id({1, 1}), 2.0);
  EXPECT_FALSE(greedy_locked(q, 0, sig));
}
