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

#ifndef ACBO_GRAPH_H_
#define ACBO_GRAPH_H_

#include <cstdint>
#include <span>
#include <vector>

#include "acbo/error.h"

namespace acbo {

// A known DAG over observed scalar nodes X_0..X_m, where X_m is the reward.
//
// Actions enter the graph through action variables. The agent controls
// agent_action_sizes.size() variables and the adversary controls
// adversary_action_sizes.size() variables; each node lists the variables
// that feed its mechanism. The common case of one action per node is built
// by PerNode(). A variable may feed several nodes (shared soft
// interventions, as in the Rosenbrock and Ackley networks).
struct CausalGraph {
  int node_count = 0;
  std::vector<std::vector<int>> parents;
  std::vector<int> agent_action_sizes;
  std::vector<int> adversary_action_sizes;
  std::vector<std::vector<int>> agent_inputs;
  std::vector<std::vector<int>> adversary_inputs;
  std::vector<int> topo_order;

  int reward_node() const { return node_count - 1; }
  int num_agent_vars() const {
    return static_cast<int>(agent_action_sizes.size());
  }
  int num_adversary_vars() const {
    return static_cast<int>(adversary_action_sizes.size());
  }

  // One agent and one adversary variable per node; a variable with size 1
  // is a placeholder and is not wired into its node's mechanism.
  static CausalGraph PerNode(std::vector<std::vector<int>> parents,
                             std::vector<int> agent_sizes,
                             std::vector<int> adversary_sizes);
};

// Checks every structural invariant; the first violation wins. Parent lists
// must be sorted and in range, the topological order must be a permutation
// in which every parent precedes its child, and the reward node must be a
// sink.
Status ValidateGraph(const CausalGraph& graph);

// Kahn's algorithm with lowest-index tie breaking. Throws kCycleDetected.
std::vector<int> TopologicalOrder(int node_count,
                                  const std::vector<std::vector<int>>& parents);

// Fills topo_order (if empty), sorts parent lists, validates, and throws on
// failure.
void FinalizeGraph(CausalGraph& graph);

std::vector<bool> Ancestors(const CausalGraph& graph, int node);
int MaxInDegree(const CausalGraph& graph);
// Number of edges on the longest directed path ending at the reward node.
int LongestPathToReward(const CausalGraph& graph);

// Discrete action indices, one per action variable.
struct ActionProfile {
  std::vector<int> agent;
  std::vector<int> adversary;

  bool operator==(const ActionProfile&) const = default;
};

Status ValidateProfile(const CausalGraph& graph, const ActionProfile& profile);

// Continuous action values as seen by the learner's models.
struct EmbeddedProfile {
  std::vector<double> agent;
  std::vector<double> adversary;
};

// Index i of a size-K variable embeds as i / (K - 1) in [0, 1]; size-1
// variables embed as 0.
double EmbedIndex(int index, int size);
EmbeddedProfile Embed(const CausalGraph& graph, const ActionProfile& profile);

// Model input of a node: [parent values..., agent values..., adversary
// values...] following the node's parent and input lists.
int NodeInputDim(const CausalGraph& graph, int node);
void AssembleNodeInput(const CausalGraph& graph, int node,
                       std::span<const double> node_values,
                       const EmbeddedProfile& actions, std::span<double> out);

// Mixed-radix codec over a product of finite action sets; the last variable
// varies fastest.
std::int64_t JointActionCount(std::span<const int> sizes);
std::vector<int> DecodeJointAction(std::span<const int> sizes,
                                   std::int64_t index);
std::int64_t EncodeJointAction(std::span<const int> sizes,
                               std::span<const int> indices);

}  // namespace acbo

#endif  // ACBO_GRAPH_H_
