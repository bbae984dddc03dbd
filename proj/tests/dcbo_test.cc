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

#include "acbo/dcbo.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "oracle_fixtures.h"

namespace acbo {
namespace {

// Reward node reading every agent variable directly, with a known mechanism.
ConfidenceModel KnownRewardModel(std::vector<int> sizes,
                                 KnownMechanism mechanism) {
  CausalGraph g;
  g.node_count = 1;
  g.parents = {{}};
  g.agent_action_sizes = sizes;
  g.agent_inputs = {{}};
  for (size_t v = 0; v < sizes.size(); ++v) g.agent_inputs[0].push_back(v);
  g.adversary_action_sizes = {1};
  g.adversary_inputs = {{}};
  FinalizeGraph(g);
  ConfidenceModel model;
  model.graph = g;
  model.beta = 0.0;
  model.noise = {NoiseSpec::None()};
  model.nodes.push_back({nullptr, std::move(mechanism)});
  return model;
}

OracleSettings CheapOracle() {
  OracleSettings s;
  s.restarts = 1;
  s.max_ascent_steps = 3;
  return s;
}

TEST(DcboTest, BankHasOneLearnerPerMultiActionVariable) {
  CausalGraph g = CausalGraph::PerNode({{}, {0}, {1}}, {3, 1, 4}, {1, 1, 2});
  AgentBank bank(g, LearningRateMode::kFixedHorizon, 10);
  ASSERT_EQ(bank.agent_count(), 2);
  EXPECT_EQ(bank.group(0), std::vector<int>{0});
  EXPECT_EQ(bank.group(1), std::vector<int>{2});
  EXPECT_EQ(bank.learner(1).state().size(), 4);
  std::vector<int> a = bank.Sample(3);
  EXPECT_EQ(a[1], 0);
  EXPECT_THROW(AgentBank(g, {{0}, {0, 2}}, LearningRateMode::kFixedHorizon, 10),
               Error);
  EXPECT_THROW(AgentBank(g, {{0}}, LearningRateMode::kFixedHorizon, 10), Error);
  AgentBank joint(g, {{0, 2}}, LearningRateMode::kFixedHorizon, 10);
  EXPECT_EQ(joint.learner(0).state().size(), 12);
}

TEST(DcboTest, SingleAgentReducesToCboMw) {
  std::mt19937_64 rng(4);
  ConfidenceModel model = fixtures::RandomConfidence(rng, 1, 1.0);
  const OracleSettings settings = CheapOracle();
  AgentBank bank(model.graph, LearningRateMode::kFixedHorizon, 30);
  MwLearner reference(3, LearningRateMode::kFixedHorizon, 30);
  auto actions = EnumerateAgentActions(model.graph, 100);
  const std::vector<int> adv = {0};
  for (int t = 0; t < 30; ++t) {
    const std::uint64_t seed = 1000 + t;
    std::vector<int> a = bank.Sample(seed);
    EXPECT_EQ(a[0], reference.Sample(seed));
    auto ucb = bank.Update(CausalScorer(model, settings), a, adv);
    auto ref = CboMwRound(reference, CausalScorer(model, settings), adv, actions);
    EXPECT_EQ(ucb[0], ref);
    EXPECT_EQ(bank.learner(0).state().Weights(), reference.state().Weights());
  }
}

TEST(DcboTest, AdditiveRewardSeparatesAcrossAgents) {
  // r = sum_i g_i(x_i); each agent's UCB vector is g_i plus the realized
  // terms of the others, so without clipping its weights follow g_i alone.
  const std::vector<std::vector<double>> g = {
      {0.1, 0.7, 0.3}, {0.5, 0.2, 0.9, 0.0}, {0.4, 0.6}};
  const std::vector<int> sizes = {3, 4, 2};
  ConfidenceModel model = KnownRewardModel(sizes, [&](std::span<const double> x) {
    double r = 0.0;
    for (size_t i = 0; i < g.size(); ++i) {
      const int idx = static_cast<int>(std::lround(x[i] * (g[i].size() - 1)));
      r += g[i][idx];
    }
    return r;
  });
  AgentBank bank(model.graph, LearningRateMode::kFixedHorizon, 50);
  const std::vector<int> adv = {0};
  for (int t = 0; t < 50; ++t) {
    std::vector<int> a = bank.Sample(t);
    auto ucb = bank.Update(CausalScorer(model, CheapOracle()), a, adv, ClipMode::kNone);
    for (size_t i = 0; i < g.size(); ++i) {
      double others = 0.0;
      for (size_t j = 0; j < g.size(); ++j) {
        if (j != i) others += g[j][a[j]];
      }
      for (size_t k = 0; k < g[i].size(); ++k) {
        EXPECT_NEAR(ucb[i][k], g[i][k] + others, 1e-9);
      }
    }
    for (int i = 0; i < bank.agent_count(); ++i) {
      const auto w = bank.learner(i).state().Weights();
      EXPECT_NEAR(std::accumulate(w.begin(), w.end(), 0.0), 1.0, 1e-9);
    }
  }
  for (size_t i = 0; i < g.size(); ++i) {
    const auto w = bank.learner(i).state().Weights();
    EXPECT_EQ(std::max_element(w.begin(), w.end()) - w.begin(),
              std::max_element(g[i].begin(), g[i].end()) - g[i].begin());
  }
}

TEST(DcboTest, UcbCallsPerRoundAreSumOfActionCounts) {
  std::mt19937_64 rng(2);
  ConfidenceModel model = fixtures::RandomConfidence(rng, 4, 1.0);
  AgentBank bank(model.graph, LearningRateMode::kFixedHorizon, 5);
  const std::vector<int> adv = {0, 1, 0, 1};
  for (int t = 0; t < 3; ++t) {
    ResetUcbCallCount();
    bank.Update(CausalScorer(model, CheapOracle()), bank.Sample(t), adv);
    EXPECT_EQ(UcbCallCount(), 4 * 3);  // not 3^4
  }
}

TEST(DcboTest, AdditiveMonotoneGameReachesNearOptimum) {
  const int agents = 4, k = 6, horizon = 500;
  ConfidenceModel model = KnownRewardModel(
      std::vector<int>(agents, k), [](std::span<const double> x) {
        return std::accumulate(x.begin(), x.end(), 0.0) / 4.0;
      });
  const double opt = 1.0;
  int good = 0;
  for (int seed = 0; seed < 3; ++seed) {
    AgentBank bank(model.graph, LearningRateMode::kFixedHorizon, horizon);
    double tail = 0.0;
    for (int t = 0; t < horizon; ++t) {
      std::vector<int> a = bank.Sample(seed * 100000 + t);
      double r = 0.0;
      for (int v : a) r += v / (k - 1.0) / agents;
      if (t >= horizon - 100) tail += r;
      bank.Update(CausalScorer(model, CheapOracle()), a, std::vector<int>{0});
    }
    good += tail / 100.0 >= 0.9 * opt;
  }
  EXPECT_EQ(good, 3);
}

TEST(DcboTest, DrSubmodularityOfCoverageAndSquares) {
  std::vector<double> axis = {0.0, 0.25, 0.5, 0.75, 1.0};
  for (int dims : {2, 3}) {
    std::vector<std::vector<double>> grid(dims, axis);
    auto coverage = [](std::span<const double> a) {
      double p = 1.0;
      for (double v : a) p *= 1.0 - v;
      return 1.0 - p;
    };
    SubmodularityReport cov = CheckDrSubmodular(coverage, grid, 1e-12);
    EXPECT_EQ(cov.dr_violations, 0);
    EXPECT_EQ(cov.monotonicity_violations, 0);
    EXPECT_GT(cov.pairs_checked, 0);

    auto squares = [](std::span<const double> a) {
      double s = 0.0;
      for (double v : a) s += v * v;
      return s;
    };
    SubmodularityReport sq = CheckDrSubmodular(squares, grid, 1e-12);
    EXPECT_GE(sq.dr_violations, 1);
    EXPECT_GT(sq.worst_dr_gap, 0.0);
    EXPECT_EQ(sq.monotonicity_violations, 0);

    auto linear = [](std::span<const double> a) {
      double s = 0.0;
      for (size_t i = 0; i < a.size(); ++i) s += (i + 1.0) * a[i];
      return s;
    };
    SubmodularityReport lin = CheckDrSubmodular(linear, grid, 1e-12);
    EXPECT_EQ(lin.dr_violations, 0);
    EXPECT_EQ(lin.monotonicity_violations, 0);
  }
  auto decreasing = [](std::span<const double> a) { return -a[0]; };
  SubmodularityReport dec =
      CheckDrSubmodular(decreasing, {axis}, 1e-12);
  EXPECT_GT(dec.monotonicity_violations, 0);
}

TEST(DcboTest, DrCheckCountsPairsAndHonoursIrregularGrids) {
  // Pairs x <= y on an n-point axis: n(n + 1) / 2 per dimension.
  auto f = [](std::span<const double> a) { return a[0] + a[1]; };
  SubmodularityReport r =
      CheckDrSubmodular(f, {{0, 1, 2}, {0, 1, 2, 3}}, 0.0);
  EXPECT_EQ(r.pairs_checked, 6 * 10);
  // Uneven spacing: increments must match in value, not index.
  auto sq = [](std::span<const double> a) { return a[0] * a[0]; };
  SubmodularityReport irr = CheckDrSubmodular(sq, {{0.0, 0.1, 1.0, 1.1}}, 1e-12);
  EXPECT_GE(irr.dr_violations, 1);
}

TEST(DcboTest, DrCheckRejectsHugeGrids) {
  std::vector<std::vector<double>> grid(8, std::vector<double>(10));
  for (auto& g : grid) std::iota(g.begin(), g.end(), 0.0);
  try {
    CheckDrSubmodular([](std::span<const double>) { return 0.0; }, grid, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kGridTooLarge);
  }
}

TEST(DcboTest, CurvatureOfLinearRewardIsZero) {
  auto linear = [](std::span<const double> a, std::span<const double> adv) {
    return 0.5 * a[0] + 2.0 * a[1] + 0.3 * a[2] + adv[0];
  };
  Curvature c = CurvatureEstimate(linear, 3, {{0.0}, {1.0}, {-2.0}}, 1.0);
  EXPECT_NEAR(c.average, 0.0, 1e-6);
  EXPECT_NEAR(c.worst_case, 0.0, 1e-6);
}

TEST(DcboTest, CurvatureOfCoverageReward) {
  // r = 1 - prod(1 - a_i / 2): dr/da_i at a = s*1 is (1/2)(1 - s/2)^(m-1).
  const int m = 3;
  auto cov = [](std::span<const double> a, std::span<const double>) {
    double p = 1.0;
    for (double v : a) p *= 1.0 - v / 2.0;
    return 1.0 - p;
  };
  const double a_max = 0.5;
  Curvature c = CurvatureEstimate(cov, m, {{0.0}, {0.0}}, a_max);
  const double expected = 1.0 - std::pow(1.0 - a_max, m - 1);
  EXPECT_NEAR(c.average, expected, 1e-6);
  EXPECT_NEAR(c.worst_case, expected, 1e-6);
  EXPECT_GT(c.average, 0.0);
  EXPECT_LT(c.average, 1.0);
}

TEST(DcboTest, CurvatureClampsAndReportsZeroGradient) {
  auto convex = [](std::span<const double> a, std::span<const double>) {
    return a[0] + a[0] * a[0];
  };
  Curvature c = CurvatureEstimate(convex, 1, {{0.0}}, 1.0);
  EXPECT_EQ(c.average, 0.0);
  EXPECT_EQ(c.worst_case, 0.0);
  auto flat = [](std::span<const double> a, std::span<const double>) {
    return a[0] * a[0];
  };
  try {
    CurvatureEstimate(flat, 1, {{0.0}}, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroBaseGradient);
  }
  auto saturating = [](std::span<const double> a, std::span<const double>) {
    return std::min(a[0], 0.5);
  };
  c = CurvatureEstimate(saturating, 1, {{0.0}}, 1.0);
  EXPECT_NEAR(c.worst_case, 1.0, 1e-9);
}

}  // namespace
}  // namespace acbo
