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

#include "acbo/confidence.h"

#include <cmath>
#include <string>

namespace acbo {

Status ValidateConfidence(const ConfidenceModel& model) {
  Status s = ValidateGraph(model.graph);
  if (!s.ok()) return s;
  const int n = model.graph.node_count;
  if (static_cast<int>(model.nodes.size()) != n) {
    return {ErrorCode::kArityMismatch, "one node model per graph node"};
  }
  if (!model.noise.empty() && static_cast<int>(model.noise.size()) != n) {
    return {ErrorCode::kArityMismatch, "noise must be empty or per node"};
  }
  if (!(model.beta >= 0.0) || !std::isfinite(model.beta)) {
    return {ErrorCode::kInvalidArgument, "beta must be finite and >= 0"};
  }
  for (int i = 0; i < n; ++i) {
    const NodeModel& m = model.nodes[i];
    if (m.gp) {
      if (m.gp->dim() != NodeInputDim(model.graph, i)) {
        return {ErrorCode::kDimensionMismatch,
                "GP of node " + std::to_string(i) + " has input dimension " +
                    std::to_string(m.gp->dim()) + ", node has " +
                    std::to_string(NodeInputDim(model.graph, i))};
      }
    } else if (!m.known) {
      return {ErrorCode::kInvalidArgument,
              "node " + std::to_string(i) + " has no model"};
    }
  }
  return Status::Ok();
}

ConfidenceModel PriorConfidence(const CausalGraph& graph, const Kernel& base,
                                double noise_scale, double beta) {
  ConfidenceModel model;
  model.graph = graph;
  model.beta = beta;
  model.noise.assign(graph.node_count, NoiseSpec::None());
  for (int i = 0; i < graph.node_count; ++i) {
    Kernel k = base;
    double l = base.lengthscales.empty() ? 0.2 : base.lengthscales[0];
    k.lengthscales.assign(NodeInputDim(graph, i), l);
    model.nodes.push_back({std::make_shared<GpPosterior>(k, noise_scale), {}});
  }
  return model;
}

}  // namespace acbo
