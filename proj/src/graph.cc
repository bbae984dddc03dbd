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

#include <algorithm>
#include <limits>
#include <queue>
#include <string>

namespace acbo {
namespace {

Status Err(ErrorCode code, std::string message) {
  return Status{code, std::move(message)};
}

bool HasCycle(int n, const std::vector<std::vector<int>>& parents) {
  // 0 = unvisited, 1 = on stack, 2 = done.
  std::vector<int> state(n, 0);
  std::vector<std::pair<int, size_t>> stack;
  for (int start = 0; start < n; ++start) {
    if (state[start] != 0) continue;
    stack.push_back({start, 0});
    state[start] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < parents[node].size()) {
        int p = parents[node][next++];
        if (state[p] == 1) return true;
        if (state[p] == 0) {
          state[p] = 1;
          stack.push_back({p, 0});
        }
      } else {
        state[node] = 2;
        stack.pop_back();
      }
    }
  }
  return false;
}

}  // namespace

CausalGraph CausalGraph::PerNode(std::vector<std::vector<int>> parents,
                                 std::vector<int> agent_sizes,
                                 std::vector<int> adversary_sizes) {
  CausalGraph g;
  g.node_count = static_cast<int>(parents.size());
  g.parents = std::move(parents);
  g.agent_action_sizes = std::move(agent_sizes);
  g.adversary_action_sizes = std::move(adversary_sizes);
  g.agent_inputs.assign(g.node_count, {});
  g.adversary_inputs.assign(g.node_count, {});
  for (int i = 0; i < g.node_count; ++i) {
    if (i < g.num_agent_vars() && g.agent_action_sizes[i] > 1) {
      g.agent_inputs[i].push_back(i);
    }
    if (i < g.num_adversary_vars() && g.adversary_action_sizes[i] > 1) {
      g.adversary_inputs[i].push_back(i);
    }
  }
  FinalizeGraph(g);
  return g;
}

Status ValidateGraph(const CausalGraph& g) {
  const int n = g.node_count;
  if (n < 1) return Err(ErrorCode::kInvalidArgument, "graph has no nodes");
  if (static_cast<int>(g.parents.size()) != n ||
      static_cast<int>(g.agent_inputs.size()) != n ||
      static_cast<int>(g.adversary_inputs.size()) != n) {
    return Err(ErrorCode::kInvalidArgument, "per-node lists must have size " +
                                                std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    for (size_t k = 0; k < g.parents[i].size(); ++k) {
      int p = g.parents[i][k];
      if (p < 0 || p >= n) {
        return Err(ErrorCode::kDanglingParent,
                   "node " + std::to_string(i) + " has parent " +
                       std::to_string(p) + " outside [0, " +
                       std::to_string(n) + ")");
      }
      if (k > 0 && g.parents[i][k - 1] >= p) {
        return Err(ErrorCode::kInvalidArgument,
                   "parents of node " + std::to_string(i) +
                       " must be sorted and unique");
      }
    }
  }
  if (HasCycle(n, g.parents)) {
    return Err(ErrorCode::kCycleDetected, "parent relation is not acyclic");
  }
  for (int i = 0; i < n; ++i) {
    for (int p : g.parents[i]) {
      if (p == g.reward_node()) {
        return Err(ErrorCode::kRewardHasChildren,
                   "reward node " + std::to_string(p) + " is a parent of " +
                       std::to_string(i));
      }
    }
  }
  for (int k : g.agent_action_sizes) {
    if (k < 1) return Err(ErrorCode::kInvalidArgument, "agent K_i < 1");
  }
  for (int k : g.adversary_action_sizes) {
    if (k < 1) return Err(ErrorCode::kInvalidArgument, "adversary K'_i < 1");
  }
  for (int i = 0; i < n; ++i) {
    for (int v : g.agent_inputs[i]) {
      if (v < 0 || v >= g.num_agent_vars()) {
        return Err(ErrorCode::kInvalidActionInput,
                   "node " + std::to_string(i) + " reads agent variable " +
                       std::to_string(v));
      }
    }
    for (int v : g.adversary_inputs[i]) {
      if (v < 0 || v >= g.num_adversary_vars()) {
        return Err(ErrorCode::kInvalidActionInput,
                   "node " + std::to_string(i) + " reads adversary variable " +
                       std::to_string(v));
      }
    }
  }
  if (static_cast<int>(g.topo_order.size()) != n) {
    return Err(ErrorCode::kInvalidTopoOrder, "topo_order has wrong length");
  }
  std::vector<int> position(n, -1);
  for (int k = 0; k < n; ++k) {
    int v = g.topo_order[k];
    if (v < 0 || v >= n || position[v] != -1) {
      return Err(ErrorCode::kInvalidTopoOrder, "topo_order is not a permutation");
    }
    position[v] = k;
  }
  for (int i = 0; i < n; ++i) {
    for (int p : g.parents[i]) {
      if (position[p] >= position[i]) {
        return Err(ErrorCode::kInvalidTopoOrder,
                   "parent " + std::to_string(p) + " does not precede " +
                       std::to_string(i));
      }
    }
  }
  return Status::Ok();
}

std::vector<int> TopologicalOrder(int n,
                                  const std::vector<std::vector<int>>& parents) {
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<int>> children(n);
  for (int i = 0; i < n; ++i) {
    for (int p : parents[i]) {
      if (p < 0 || p >= n) {
        Fail(ErrorCode::kDanglingParent,
             "node " + std::to_string(i) + " has parent " + std::to_string(p));
      }
      children[p].push_back(i);
      ++indegree[i];
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int i = 0; i < n; ++i) {
    if (indegree[i] == 0) ready.push(i);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : children[v]) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  if (static_cast<int>(order.size()) != n) {
    Fail(ErrorCode::kCycleDetected, "parent relation is not acyclic");
  }
  return order;
}

void FinalizeGraph(CausalGraph& g) {
  for (auto& ps : g.parents) std::sort(ps.begin(), ps.end());
  if (g.agent_inputs.empty()) g.agent_inputs.assign(g.node_count, {});
  if (g.adversary_inputs.empty()) g.adversary_inputs.assign(g.node_count, {});
  if (g.topo_order.empty() &&
      static_cast<int>(g.parents.size()) == g.node_count) {
    g.topo_order = TopologicalOrder(g.node_count, g.parents);
  }
  Status s = ValidateGraph(g);
  if (!s.ok()) Fail(s.code, s.message);
}

std::vector<bool> Ancestors(const CausalGraph& g, int node) {
  std::vector<bool> seen(g.node_count, false);
  std::vector<int> stack(g.parents[node].begin(), g.parents[node].end());
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = true;
    for (int p : g.parents[v]) stack.push_back(p);
  }
  return seen;
}

int MaxInDegree(const CausalGraph& g) {
  size_t best = 0;
  for (const auto& ps : g.parents) best = std::max(best, ps.size());
  return static_cast<int>(best);
}

int LongestPathToReward(const CausalGraph& g) {
  // Longest path (in edges) from each node to the reward, over reverse topo
  // order; unreachable nodes stay at -1.
  std::vector<int> dist(g.node_count, -1);
  dist[g.reward_node()] = 0;
  for (auto it = g.topo_order.rbegin(); it != g.topo_order.rend(); ++it) {
    int v = *it;
    if (dist[v] < 0) continue;
    for (int p : g.parents[v]) dist[p] = std::max(dist[p], dist[v] + 1);
  }
  return *std::max_element(dist.begin(), dist.end());
}

Status ValidateProfile(const CausalGraph& g, const ActionProfile& profile) {
  if (static_cast<int>(profile.agent.size()) != g.num_agent_vars() ||
      static_cast<int>(profile.adversary.size()) != g.num_adversary_vars()) {
    return Err(ErrorCode::kInvalidProfile, "profile has wrong arity");
  }
  for (int v = 0; v < g.num_agent_vars(); ++v) {
    if (profile.agent[v] < 0 || profile.agent[v] >= g.agent_action_sizes[v]) {
      return Err(ErrorCode::kInvalidProfile,
                 "agent index out of range at variable " + std::to_string(v));
    }
  }
  for (int v = 0; v < g.num_adversary_vars(); ++v) {
    if (profile.adversary[v] < 0 ||
        profile.adversary[v] >= g.adversary_action_sizes[v]) {
      return Err(ErrorCode::kInvalidProfile,
                 "adversary index out of range at variable " +
                     std::to_string(v));
    }
  }
  return Status::Ok();
}

double EmbedIndex(int index, int size) {
  return size > 1 ? static_cast<double>(index) / (size - 1) : 0.0;
}

EmbeddedProfile Embed(const CausalGraph& g, const ActionProfile& profile) {
  EmbeddedProfile e;
  e.agent.resize(profile.agent.size());
  e.adversary.resize(profile.adversary.size());
  for (size_t v = 0; v < profile.agent.size(); ++v) {
    e.agent[v] = EmbedIndex(profile.agent[v], g.agent_action_sizes[v]);
  }
  for (size_t v = 0; v < profile.adversary.size(); ++v) {
    e.adversary[v] =
        EmbedIndex(profile.adversary[v], g.adversary_action_sizes[v]);
  }
  return e;
}

int NodeInputDim(const CausalGraph& g, int node) {
  return static_cast<int>(g.parents[node].size() + g.agent_inputs[node].size() +
                          g.adversary_inputs[node].size());
}

void AssembleNodeInput(const CausalGraph& g, int node,
                       std::span<const double> node_values,
                       const EmbeddedProfile& actions, std::span<double> out) {
  size_t k = 0;
  for (int p : g.parents[node]) out[k++] = node_values[p];
  for (int v : g.agent_inputs[node]) out[k++] = actions.agent[v];
  for (int v : g.adversary_inputs[node]) out[k++] = actions.adversary[v];
}

std::int64_t JointActionCount(std::span<const int> sizes) {
  std::int64_t count = 1;
  for (int k : sizes) {
    if (count > std::numeric_limits<std::int64_t>::max() / std::max(k, 1)) {
      return std::numeric_limits<std::int64_t>::max();
    }
    count *= k;
  }
  return count;
}

std::vector<int> DecodeJointAction(std::span<const int> sizes,
                                   std::int64_t index) {
  std::vector<int> out(sizes.size());
  for (size_t v = sizes.size(); v-- > 0;) {
    out[v] = static_cast<int>(index % sizes[v]);
    index /= sizes[v];
  }
  return out;
}

std::int64_t EncodeJointAction(std::span<const int> sizes,
                               std::span<const int> indices) {
  std::int64_t index = 0;
  for (size_t v = 0; v < sizes.size(); ++v) index = index * sizes[v] + indices[v];
  return index;
}

}  // namespace acbo
