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

#ifndef ACBO_BASELINES_H_
#define ACBO_BASELINES_H_

#include <span>
#include <vector>

#include "acbo/mw.h"

namespace acbo {

// One GP from embedded action values straight to the reward, ignoring the
// graph. Inputs are [agent values..., adversary values...], or agent values
// only when the adversary is not modelled (GP-UCB).
class FlatGpModel {
 public:
  FlatGpModel(const CausalGraph& graph, Kernel::Kind kind, double lengthscale,
              double noise_scale, bool with_adversary);

  int input_dim() const { return gp_.dim(); }
  bool with_adversary() const { return with_adversary_; }
  const GpPosterior& gp() const { return gp_; }

  std::vector<double> Input(const ActionProfile& profile) const;
  void Observe(const ActionProfile& profile, double reward);

  // mu + beta * sigma for every profile.
  std::vector<double> Ucb(const std::vector<ActionProfile>& profiles,
                          double beta) const;

 private:
  CausalGraph graph_;
  bool with_adversary_;
  GpPosterior gp_;
};

// Closed-form scorer over the flat GP; counts one UCB call per profile.
ActionScorer FlatScorer(const FlatGpModel& model, double beta);

// GP-MW: the MW step with flat-GP optimism. Returns the raw UCB vector.
std::vector<double> GpMwRound(MwLearner& learner, const FlatGpModel& model,
                              double beta, std::span<const int> observed_adversary,
                              const std::vector<std::vector<int>>& action_set);

// GP-UCB over an agent-only flat model; lowest index wins ties.
int GpUcbRound(const FlatGpModel& model, double beta,
               const std::vector<std::vector<int>>& action_set);

// Causal optimism without adversary adaptation: argmax of the causal UCB with
// the adversary fixed at its default action (all zeros). Lowest index wins.
int McboRound(const ConfidenceModel& model, const OracleSettings& settings,
              const std::vector<std::vector<int>>& action_set);

// Lowest-index argmax.
int ArgMax(std::span<const double> values);

}  // namespace acbo

#endif  // ACBO_BASELINES_H_
