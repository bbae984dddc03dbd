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

#include "acbo/graph.h"

#include <gtest/gtest.h>

#include <random>

namespace acbo {
namespace {

CausalGraph Chain(int n) {
  std::vector<std::vector<int>> parents(n);
  for (int i = 1; i < n; ++i) parents[i] = {i - 1};
  return CausalGraph::PerNode(parents, std::vector<int>(n, 3),
                              std::vector<int>(n, 2));
}

TEST(GraphTest, ValidChain) {
  CausalGraph g = Chain(3);
  EXPECT_EQ(g.topo_order, (std::vector<int>{0, 1, 2}));
  EXPECT_TRUE(ValidateGraph(g).ok());
}

TEST(GraphTest, TwoCycle) {
  CausalGraph g = Chain(3);
  g.parents[0] = {1};
  EXPECT_EQ(ValidateGraph(g).code, ErrorCode::kCycleDetected);
  EXPECT_THROW(TopologicalOrder(3, g.parents), Error);
}

TEST(GraphTest, RewardWithChild) {
  CausalGraph g = Chain(3);
  g.parents = {{2}, {}, {1}};
  EXPECT_EQ(ValidateGraph(g).code, ErrorCode::kRewardHasChildren);
}

TEST(GraphTest, DanglingParent) {
  CausalGraph g = Chain(3);
  g.parents[1] = {7};
  EXPECT_EQ(ValidateGraph(g).code, ErrorCode::kDanglingParent);
}

TEST(GraphTest, BadTopoOrder) {
  CausalGraph g = Chain(3);
  g.topo_order = {1, 0, 2};
  EXPECT_EQ(ValidateGraph(g).code, ErrorCode::kInvalidTopoOrder);
  g.topo_order = {0, 0, 2};
  EXPECT_EQ(ValidateGraph(g).code, ErrorCode::kInvalidTopoOrder);
}

TEST(GraphTest, FinalizeThrowsWithCode) {
  CausalGraph g;
  g.node_count = 2;
  g.parents = {{1}, {0}};
  try {
    FinalizeGraph(g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCycleDetected);
  }
}

TEST(GraphTest, PlaceholderActionsAreNotWired) {
  CausalGraph g = CausalGraph::PerNode({{}, {0}}, {4, 1}, {1, 2});
  EXPECT_EQ(g.agent_inputs[0], std::vector<int>{0});
  EXPECT_TRUE(g.agent_inputs[1].empty());
  EXPECT_TRUE(g.adversary_inputs[0].empty());
  EXPECT_EQ(g.adversary_inputs[1], std::vector<int>{1});
  EXPECT_EQ(NodeInputDim(g, 1), 2);
}

TEST(GraphTest, Structure) {
  // 0 -> 2, 1 -> 2, 2 -> 3, 0 -> 3.
  CausalGraph g =
      CausalGraph::PerNode({{}, {}, {1, 0}, {2, 0}}, {2, 2, 2, 1}, {1, 1, 1, 1});
  EXPECT_EQ(g.parents[2], (std::vector<int>{0, 1}));
  EXPECT_EQ(MaxInDegree(g), 2);
  EXPECT_EQ(LongestPathToReward(g), 2);
  auto anc = Ancestors(g, 2);
  EXPECT_TRUE(anc[0] && anc[1]);
  EXPECT_FALSE(anc[2] || anc[3]);
}

TEST(GraphTest, RandomDagsHaveValidOrders) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(rng() % 8);
    std::vector<std::vector<int>> parents(n);
    // Edges follow a random permutation so the order is not the identity.
    std::vector<int> perm(n - 1);
    for (int i = 0; i < n - 1; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int a = 0; a < n - 1; ++a) {
      for (int b = a + 1; b < n - 1; ++b) {
        if (rng() % 3 == 0) parents[perm[b]].push_back(perm[a]);
      }
      if (rng() % 2 == 0) parents[n - 1].push_back(perm[a]);
    }
    CausalGraph g = CausalGraph::PerNode(parents, std::vector<int>(n, 2),
                                         std::vector<int>(n, 1));
    EXPECT_TRUE(ValidateGraph(g).ok());
  }
}

TEST(GraphTest, ProfileValidation) {
  CausalGraph g = Chain(2);
  EXPECT_TRUE(ValidateProfile(g, {{0, 2}, {1, 0}}).ok());
  EXPECT_EQ(ValidateProfile(g, {{0, 3}, {1, 0}}).code,
            ErrorCode::kInvalidProfile);
  EXPECT_EQ(ValidateProfile(g, {{0}, {1, 0}}).code, ErrorCode::kInvalidProfile);
}

TEST(GraphTest, JointActionCodecRoundTrips) {
  std::vector<int> sizes = {3, 1, 4, 2};
  EXPECT_EQ(JointActionCount(sizes), 24);
  for (std::int64_t i = 0; i < 24; ++i) {
    auto idx = DecodeJointAction(sizes, i);
    EXPECT_EQ(EncodeJointAction(sizes, idx), i);
  }
  EXPECT_EQ(DecodeJointAction(sizes, 1), (std::vector<int>{0, 0, 0, 1}));
  std::vector<int> huge(40, 116);
  EXPECT_EQ(JointActionCount(huge), std::numeric_limits<std::int64_t>::max());
}

TEST(GraphTest, EmbedIndex) {
  EXPECT_DOUBLE_EQ(EmbedIndex(0, 5), 0.0);
  EXPECT_DOUBLE_EQ(EmbedIndex(4, 5), 1.0);
  EXPECT_DOUBLE_EQ(EmbedIndex(0, 1), 0.0);
}

}  // namespace
}  // namespace acbo
