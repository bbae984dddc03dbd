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

#include "acbo/scm.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace acbo {

double NoiseSpec::Sample(std::mt19937_64& rng) const {
  switch (kind) {
    case Kind::kNone:
      return 0.0;
    case Kind::kUniform: {
      std::uniform_real_distribution<double> u(-scale, scale);
      return std::clamp(u(rng), -1.0, 1.0);
    }
    case Kind::kTruncatedGaussian: {
      if (scale == 0.0) return 0.0;
      std::normal_distribution<double> n(0.0, scale);
      // Rejection keeps the distribution symmetric, hence zero-mean.
      for (int attempt = 0; attempt < 1000; ++attempt) {
        double x = n(rng);
        if (x >= -1.0 && x <= 1.0) return x;
      }
      return 0.0;
    }
  }
  return 0.0;
}

bool GroundTruthScm::noiseless() const {
  return std::all_of(noise.begin(), noise.end(),
                     [](const NoiseSpec& s) { return s.is_none(); });
}

double GroundTruthScm::AgentValue(int var, int index) const {
  if (var < static_cast<int>(agent_values.size()) &&
      !agent_values[var].empty()) {
    return agent_values[var][index];
  }
  return EmbedIndex(index, graph.agent_action_sizes[var]);
}

double GroundTruthScm::AdversaryValue(int var, int index) const {
  if (var < static_cast<int>(adversary_values.size()) &&
      !adversary_values[var].empty()) {
    return adversary_values[var][index];
  }
  return EmbedIndex(index, graph.adversary_action_sizes[var]);
}

Status ValidateScm(const GroundTruthScm& scm) {
  Status s = ValidateGraph(scm.graph);
  if (!s.ok()) return s;
  const auto& g = scm.graph;
  if (static_cast<int>(scm.mechanisms.size()) != g.node_count ||
      static_cast<int>(scm.noise.size()) != g.node_count) {
    return {ErrorCode::kArityMismatch, "one mechanism and noise per node"};
  }
  for (int i = 0; i < g.node_count; ++i) {
    const Mechanism& m = scm.mechanisms[i];
    if (!m.fn) {
      return {ErrorCode::kArityMismatch,
              "node " + std::to_string(i) + " has no mechanism"};
    }
    if ((m.num_parents >= 0 &&
         m.num_parents != static_cast<int>(g.parents[i].size())) ||
        (m.num_agent >= 0 &&
         m.num_agent != static_cast<int>(g.agent_inputs[i].size())) ||
        (m.num_adversary >= 0 &&
         m.num_adversary != static_cast<int>(g.adversary_inputs[i].size()))) {
      return {ErrorCode::kArityMismatch,
              "mechanism arity does not match node " + std::to_string(i)};
    }
    const NoiseSpec& n = scm.noise[i];
    if (n.scale < 0.0 || (n.kind == NoiseSpec::Kind::kUniform && n.scale > 1.0)) {
      return {ErrorCode::kInvalidArgument,
              "noise scale out of range at node " + std::to_string(i)};
    }
  }
  for (size_t v = 0; v < scm.agent_values.size(); ++v) {
    if (!scm.agent_values[v].empty() &&
        static_cast<int>(scm.agent_values[v].size()) !=
            g.agent_action_sizes[v]) {
      return {ErrorCode::kArityMismatch, "agent value table size != K"};
    }
  }
  for (size_t v = 0; v < scm.adversary_values.size(); ++v) {
    if (!scm.adversary_values[v].empty() &&
        static_cast<int>(scm.adversary_values[v].size()) !=
            g.adversary_action_sizes[v]) {
      return {ErrorCode::kArityMismatch, "adversary value table size != K'"};
    }
  }
  return Status::Ok();
}

std::vector<double> EvaluateScm(const GroundTruthScm& scm,
                                const ActionProfile& profile,
                                std::span<const double> noise) {
  const auto& g = scm.graph;
  std::vector<double> x(g.node_count, 0.0);
  std::vector<double> parents, agent, adversary;
  for (int i : g.topo_order) {
    parents.clear();
    agent.clear();
    adversary.clear();
    for (int p : g.parents[i]) parents.push_back(x[p]);
    for (int v : g.agent_inputs[i]) {
      agent.push_back(scm.AgentValue(v, profile.agent[v]));
    }
    for (int v : g.adversary_inputs[i]) {
      adversary.push_back(scm.AdversaryValue(v, profile.adversary[v]));
    }
    x[i] = scm.mechanisms[i].fn(parents, agent, adversary) + noise[i];
  }
  return x;
}

RoundRecord SimulateRound(const GroundTruthScm& scm,
                          const ActionProfile& profile, std::uint64_t rng_seed,
                          int round) {
  Status s = ValidateProfile(scm.graph, profile);
  if (!s.ok()) Fail(s.code, s.message);
  std::mt19937_64 rng(rng_seed);
  std::vector<double> noise(scm.graph.node_count, 0.0);
  for (int i : scm.graph.topo_order) noise[i] = scm.noise[i].Sample(rng);
  RoundRecord rec;
  rec.round = round;
  rec.profile = profile;
  rec.node_values = EvaluateScm(scm, profile, noise);
  rec.reward = rec.node_values[scm.graph.reward_node()];
  return rec;
}

double ExpectedReward(const GroundTruthScm& scm, const ActionProfile& profile,
                      int num_noise_samples, std::uint64_t rng_seed) {
  Status s = ValidateProfile(scm.graph, profile);
  if (!s.ok()) Fail(s.code, s.message);
  if (scm.noiseless()) {
    std::vector<double> zero(scm.graph.node_count, 0.0);
    return EvaluateScm(scm, profile, zero)[scm.graph.reward_node()];
  }
  if (num_noise_samples < 1) {
    Fail(ErrorCode::kInvalidArgument, "num_noise_samples must be >= 1");
  }
  std::mt19937_64 rng(rng_seed);
  std::vector<double> noise(scm.graph.node_count, 0.0);
  double total = 0.0;
  for (int k = 0; k < num_noise_samples; ++k) {
    for (int i : scm.graph.topo_order) noise[i] = scm.noise[i].Sample(rng);
    total += EvaluateScm(scm, profile, noise)[scm.graph.reward_node()];
  }
  return total / num_noise_samples;
}

}  // namespace acbo
