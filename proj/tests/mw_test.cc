// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acbo/mw.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "oracle_fixtures.h"

namespace acbo {
namespace {

double Sum(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

// Realized external regret of expected-weight play against a fixed reward
// sequence, from an independent plain-weights Hedge implementation.
struct HedgeRun {
  double regret_from_state;
  double regret_reference;
};

HedgeRun PlayHedge(const std::vector<std::vector<double>>& rewards, double tau) {
  const int k = static_cast<int>(rewards[0].size());
  MwState state(k, tau);
  std::vector<double> plain(k, 1.0), totals(k, 0.0);
  double earned = 0.0, earned_plain = 0.0;
  for (const auto& r : rewards) {
    std::vector<double> w = state.Weights();
    double z = Sum(plain);
    for (int a = 0; a < k; ++a) {
      earned += w[a] * r[a];
      earned_plain += plain[a] / z * r[a];
      totals[a] += r[a];
      plain[a] *= std::exp(tau * r[a]);
    }
    state = MwUpdate(state, r);
  }
  const double best = *std::max_element(totals.begin(), totals.end());
  return {best - earned, best - earned_plain};
}

TEST(MwTest, UniformStartAndSingleAction) {
  MwState s(4, 0.1);
  for (double w : s.Weights()) EXPECT_DOUBLE_EQ(w, 0.25);
  MwState one(1, 0.3);
  for (std::uint64_t seed = 0; seed < 20; ++seed) EXPECT_EQ(MwSample(one, seed), 0);
}

TEST(MwTest, TwoActionUpdateMatchesClosedForm) {
  MwState s(2, std::log(2.0));
  const std::vector<double> r = {1.0, 0.0};
  std::vector<double> w = MwUpdate(s, r).Weights();
  EXPECT_NEAR(w[0], 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(w[1], 1.0 / 3.0, 1e-12);
}

TEST(MwTest, EqualRewardsAndZeroRateLeaveWeightsUnchanged) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MwState s(5, 0.7);
  for (int t = 0; t < 4; ++t) {
    std::vector<double> r(5);
    for (double& x : r) x = u(rng);
    s = MwUpdate(s, r);
  }
  const std::vector<double> before = s.Weights();
  const std::vector<double> flat(5, 0.42);
  std::vector<double> after = MwUpdate(s, flat).Weights();
  for (int a = 0; a < 5; ++a) EXPECT_NEAR(after[a], before[a], 1e-12);

  s.set_learning_rate(0.0);
  std::vector<double> r = {1.0, 0.0, 0.5, 0.2, 0.9};
  after = MwUpdate(s, r).Weights();
  for (int a = 0; a < 5; ++a) EXPECT_NEAR(after[a], before[a], 1e-12);
}

TEST(MwTest, RejectsOutOfRangeRewards) {
  MwState s(3, 0.5);
  for (double bad : {-0.01, 1.01, std::nan("")}) {
    std::vector<double> r = {0.5, bad, 0.5};
    try {
      MwUpdate(s, r);
      FAIL() << "accepted " << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kRewardOutOfRange);
    }
  }
  std::vector<double> raw = {2.0, -1.0, 0.0};
  EXPECT_NO_THROW(MwUpdate(s, raw, /*check_range=*/false));
}

TEST(MwTest, WeightsStayPositiveAndNormalized) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MwState s(8, 5.0);  // Aggressive rate: plain weights would underflow.
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> r(8);
    for (double& x : r) x = u(rng);
    r[t % 8] = 1.0;
    s = MwUpdate(s, r);
    std::vector<double> w = s.Weights();
    EXPECT_NEAR(Sum(w), 1.0, 1e-9);
    for (double lw : s.log_weights()) ASSERT_TRUE(std::isfinite(lw));
  }
}

TEST(MwTest, UniformSamplingFrequencies) {
  MwState s(4, 0.1);
  std::vector<int> counts(4, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) ++counts[MwSample(s, 1000 + i)];
  for (int c : counts) EXPECT_NEAR(c / static_cast<double>(draws), 0.25, 0.01);
}

TEST(MwTest, SamplingFollowsSkewedWeights) {
  MwState s(3, 1.0);
  const std::vector<double> r = {1.0, 0.0, 0.0};
  for (int t = 0; t < 3; ++t) s = MwUpdate(s, r);
  const double p0 = s.Weights()[0];
  int hits = 0;
  const int draws = 50000;
  for (int i = 0; i < draws; ++i) hits += MwSample(s, 77 * i + 5) == 0;
  EXPECT_NEAR(hits / static_cast<double>(draws), p0, 0.01);
  EXPECT_EQ(MwSample(s, 9), MwSample(s, 9));
}

TEST(MwTest, HedgeBoundExamples) {
  const double tau = std::sqrt(std::log(2.0));
  EXPECT_NEAR(HedgeRegretBound(2, 8, tau), 2.0 * std::sqrt(std::log(2.0)), 1e-12);
  EXPECT_NEAR(HedgeRegretBound(2, 8, tau), 1.665, 1e-3);
  for (int k : {2, 5, 8}) {
    for (int t : {1, 16, 512}) {
      EXPECT_NEAR(HedgeRegretBound(k, t, FixedHorizonRate(k, t)),
                  std::sqrt(t * std::log(k) / 2.0), 1e-9);
    }
  }
  EXPECT_NEAR(HedgeRegretBound(1, 1, 0.4), 0.05, 1e-15);
  EXPECT_THROW(HedgeRegretBound(2, 8, 0.0), Error);
}

TEST(MwTest, NoRegretOnRandomSequences) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + trial % 7, horizon = 32 << (trial % 5);
    std::vector<std::vector<double>> rewards(horizon, std::vector<double>(k));
    for (auto& r : rewards) {
      for (double& x : r) x = u(rng);
    }
    const double tau = FixedHorizonRate(k, horizon);
    HedgeRun run = PlayHedge(rewards, tau);
    EXPECT_NEAR(run.regret_from_state, run.regret_reference, 1e-9);
    EXPECT_LE(run.regret_from_state, HedgeRegretBound(k, horizon, tau));
  }
}

TEST(MwTest, NoRegretAgainstAdaptiveAdversary) {
  // The adversary rewards whichever action currently has the least weight,
  // the classical worst case for exponential weights.
  for (int k : {2, 4, 8}) {
    const int horizon = 512;
    const double tau = FixedHorizonRate(k, horizon);
    MwState s(k, tau);
    std::vector<double> totals(k, 0.0);
    double earned = 0.0;
    for (int t = 0; t < horizon; ++t) {
      std::vector<double> w = s.Weights();
      const int low = static_cast<int>(std::min_element(w.begin(), w.end()) - w.begin());
      std::vector<double> r(k, 0.0);
      r[low] = 1.0;
      for (int a = 0; a < k; ++a) {
        earned += w[a] * r[a];
        totals[a] += r[a];
      }
      s = MwUpdate(s, r);
    }
    const double regret = *std::max_element(totals.begin(), totals.end()) - earned;
    EXPECT_LE(regret, HedgeRegretBound(k, horizon, tau));
    EXPECT_GT(regret, 0.0);
  }
}

TEST(MwTest, PermutationEquivariance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int k = 6;
  std::vector<int> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  MwState s(k, 0.3), sp(k, 0.3);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> r(k), rp(k);
    for (double& x : r) x = u(rng);
    for (int a = 0; a < k; ++a) rp[perm[a]] = r[a];
    s = MwUpdate(s, r);
    sp = MwUpdate(sp, rp);
  }
  std::vector<double> w = s.Weights(), wp = sp.Weights();
  for (int a = 0; a < k; ++a) EXPECT_NEAR(wp[perm[a]], w[a], 1e-12);
}

TEST(MwTest, DoublingTrickRestartsAtPowersOfTwo) {
  MwLearner learner(3, LearningRateMode::kDoublingTrick, 100);
  EXPECT_NEAR(learner.state().learning_rate(), FixedHorizonRate(3, 1), 1e-15);
  const std::vector<double> r = {1.0, 0.0, 0.0};
  int played = 0;
  for (int epoch_len : {1, 2, 4, 8}) {
    for (int i = 0; i < epoch_len; ++i) {
      if (i > 0) EXPECT_GT(learner.state().Weights()[0], 1.0 / 3.0);
      learner.Update(r);
      ++played;
    }
    // Reaching 2, 4, 8, 16 played rounds starts a fresh epoch.
    EXPECT_NEAR(learner.state().Weights()[0], 1.0 / 3.0, 1e-12) << played;
    EXPECT_NEAR(learner.state().learning_rate(),
                FixedHorizonRate(3, 2 * epoch_len), 1e-15);
  }
}

TEST(MwTest, FixedHorizonLearnerUsesTheoremRate) {
  MwLearner learner(8, LearningRateMode::kFixedHorizon, 512);
  EXPECT_NEAR(learner.state().learning_rate(), std::sqrt(8 * std::log(8.0) / 512),
              1e-15);
  EXPECT_THROW(MwLearner(8, LearningRateMode::kFixedHorizon, 0), Error);
}

TEST(MwTest, ClipRewardsLandsInUnitInterval) {
  const std::vector<double> raw = {-3.0, 0.2, 1.7, 1.0, 0.0};
  std::vector<double> c = ClipRewards(raw, ClipMode::kUnitInterval);
  EXPECT_EQ(c, (std::vector<double>{0.0, 0.2, 1.0, 1.0, 0.0}));
  EXPECT_EQ(ClipRewards(raw, ClipMode::kNone), raw);
}

TEST(MwTest, CboMwRoundWithKnownLinearTruth) {
  // Reward = 0.3 * a0 + 0.9 * a1 - 0.5 * adversary, all known: the UCB is the
  // exact reward for every joint action.
  CausalGraph g = CausalGraph::PerNode({{}}, {1}, {1});
  g.agent_inputs = {{0, 1}};
  g.agent_action_sizes = {3, 3};
  g.adversary_action_sizes = {2};
  g.adversary_inputs = {{0}};
  FinalizeGraph(g);
  ConfidenceModel model;
  model.graph = g;
  model.beta = 0.0;
  model.noise = {NoiseSpec::None()};
  model.nodes.push_back({nullptr, [](std::span<const double> x) {
                           return 0.3 * x[0] + 0.9 * x[1] - 0.5 * x[2];
                         }});
  OracleSettings settings;
  settings.restarts = 1;
  settings.max_ascent_steps = 5;
  auto actions = EnumerateAgentActions(g, 100);
  ASSERT_EQ(actions.size(), 9u);
  MwLearner learner(9, LearningRateMode::kFixedHorizon, 10);
  const std::vector<int> adv = {1};
  std::vector<double> ucb =
      CboMwRound(learner, CausalScorer(model, settings), adv, actions);
  for (size_t k = 0; k < actions.size(); ++k) {
    const double truth =
        0.3 * actions[k][0] / 2.0 + 0.9 * actions[k][1] / 2.0 - 0.5;
    EXPECT_NEAR(ucb[k], truth, 1e-9);
  }
  EXPECT_NEAR(Sum(learner.state().Weights()), 1.0, 1e-9);
  // Clipped: actions with negative truth get the same (zero) credit.
  std::vector<double> w = learner.state().Weights();
  EXPECT_NEAR(w[0], w[1], 1e-15);
  EXPECT_GT(w[8], w[4]);
}

TEST(MwTest, CboMwRoundIsDeterministic) {
  std::mt19937_64 rng(8);
  ConfidenceModel model = fixtures::RandomConfidence(rng, 3, 1.5);
  OracleSettings settings;
  settings.restarts = 2;
  settings.max_ascent_steps = 10;
  auto actions = EnumerateAgentActions(model.graph, 1000);
  const std::vector<int> adv = {0, 1, 0};
  MwLearner a(actions.size(), LearningRateMode::kFixedHorizon, 20);
  MwLearner b = a;
  std::vector<double> u1 = CboMwRound(a, CausalScorer(model, settings), adv, actions);
  std::vector<double> u2 = CboMwRound(b, CausalScorer(model, settings), adv, actions);
  EXPECT_EQ(u1, u2);
  EXPECT_EQ(a.state().Weights(), b.state().Weights());
  for (double y : ClipRewards(u1, ClipMode::kUnitInterval)) {
    EXPECT_GE(y, 0.0);
    EXPECT_LE(y, 1.0);
  }
}

TEST(MwTest, EnumerationLimits) {
  CausalGraph g = CausalGraph::PerNode({{}, {0}}, {4, 5}, {1, 1});
  auto all = EnumerateAgentActions(g, 20);
  ASSERT_EQ(all.size(), 20u);
  EXPECT_EQ(all[1], (std::vector<int>{0, 1}));
  try {
    EnumerateAgentActions(g, 19);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kActionSpaceTooLarge);
  }
}

}  // namespace
}  // namespace acbo
