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

#ifndef ACBO_CONFIDENCE_H_
#define ACBO_CONFIDENCE_H_

#include <functional>
#include <span>
#include <vector>

#include "acbo/gp.h"
#include "acbo/graph.h"
#include "acbo/scm.h"

namespace acbo {

// A node mechanism the learner knows exactly, as a function of the node's
// assembled model input (see AssembleNodeInput).
using KnownMechanism = std::function<double(std::span<const double> input)>;

struct NodeModel {
  GpSnapshot gp;          // set for unknown mechanisms
  KnownMechanism known;   // set for known mechanisms

  bool is_known() const { return gp == nullptr; }
};

// The plausible-model set at one round: every unknown mechanism lies in
// mu +- beta * sigma. One beta is shared by all nodes.
struct ConfidenceModel {
  CausalGraph graph;
  std::vector<NodeModel> nodes;
  std::vector<NoiseSpec> noise;
  double beta = 0.0;
  // Reward is a known monotone aggregator of unknown nodes, so eta = +1 on
  // every unknown node is optimal and no ascent is needed.
  bool eta_one_shortcut = false;
};

Status ValidateConfidence(const ConfidenceModel& model);

// Builds a model with empty GP priors on every node.
ConfidenceModel PriorConfidence(const CausalGraph& graph, const Kernel& base,
                                double noise_scale, double beta);

}  // namespace acbo

#endif  // ACBO_CONFIDENCE_H_
