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

#include "acbo/baselines.h"

namespace acbo {
namespace {

int FlatDim(const CausalGraph& graph, bool with_adversary) {
  return graph.num_agent_vars() + (with_adversary ? graph.num_adversary_vars() : 0);
}

Kernel MakeKernel(Kernel::Kind kind, int dim, double lengthscale) {
  switch (kind) {
    case Kernel::Kind::kRbf:
      return Kernel::Rbf(dim, lengthscale);
    case Kernel::Kind::kMatern52:
      return Kernel::Matern52(dim, lengthscale);
    case Kernel::Kind::kLinear:
      return Kernel::Linear(dim, lengthscale);
  }
  return Kernel::Rbf(dim, lengthscale);
}

}  // namespace

FlatGpModel::FlatGpModel(const CausalGraph& graph, Kernel::Kind kind,
                         double lengthscale, double noise_scale,
                         bool with_adversary)
    : graph_(graph),
      with_adversary_(with_adversary),
      gp_(MakeKernel(kind, FlatDim(graph, with_adversary), lengthscale),
          noise_scale) {}

std::vector<double> FlatGpModel::Input(const ActionProfile& profile) const {
  ActionProfile p = profile;
  if (!with_adversary_) p.adversary.assign(graph_.num_adversary_vars(), 0);
  const Status st = ValidateProfile(graph_, p);
  if (st.code != ErrorCode::kOk) Fail(st.code, st.message);
  EmbeddedProfile e = Embed(graph_, p);
  std::vector<double> x = e.agent;
  if (with_adversary_) x.insert(x.end(), e.adversary.begin(), e.adversary.end());
  return x;
}

void FlatGpModel::Observe(const ActionProfile& profile, double reward) {
  gp_.Add(Input(profile), reward);
}

std::vector<double> FlatGpModel::Ucb(const std::vector<ActionProfile>& profiles,
                                     double beta) const {
  Eigen::MatrixXd q(input_dim(), profiles.size());
  for (size_t j = 0; j < profiles.size(); ++j) {
    const std::vector<double> x = Input(profiles[j]);
    for (int d = 0; d < input_dim(); ++d) q(d, j) = x[d];
  }
  GpPosterior::Batch batch;
  gp_.Predict(q, false, &batch);
  std::vector<double> out(profiles.size());
  for (size_t j = 0; j < profiles.size(); ++j) {
    out[j] = batch.mean[j] + beta * batch.sd[j];
  }
  return out;
}

ActionScorer FlatScorer(const FlatGpModel& model, double beta) {
  return [&model, beta](const std::vector<ActionProfile>& profiles) {
    RecordUcbCalls(static_cast<std::int64_t>(profiles.size()));
    return model.Ucb(profiles, beta);
  };
}

std::vector<double> GpMwRound(MwLearner& learner, const FlatGpModel& model,
                              double beta, std::span<const int> observed_adversary,
                              const std::vector<std::vector<int>>& action_set) {
  return CboMwRound(learner, FlatScorer(model, beta), observed_adversary,
                    action_set);
}

int ArgMax(std::span<const double> values) {
  int best = 0;
  for (size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[best]) best = static_cast<int>(k);
  }
  return best;
}

int GpUcbRound(const FlatGpModel& model, double beta,
               const std::vector<std::vector<int>>& action_set) {
  std::vector<ActionProfile> profiles;
  for (const auto& a : action_set) profiles.push_back({a, {}});
  return ArgMax(model.Ucb(profiles, beta));
}

int McboRound(const ConfidenceModel& model, const OracleSettings& settings,
              const std::vector<std::vector<int>>& action_set) {
  const std::vector<int> fixed(model.graph.num_adversary_vars(), 0);
  std::vector<ActionProfile> profiles;
  for (const auto& a : action_set) profiles.push_back({a, fixed});
  return ArgMax(UcbBatch(model, profiles, settings));
}

}  // namespace acbo
