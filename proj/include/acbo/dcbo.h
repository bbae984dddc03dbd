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

#ifndef ACBO_DCBO_H_
#define ACBO_DCBO_H_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "acbo/mw.h"

namespace acbo {

// One MW learner per agent. By default every agent variable with more than
// one action is its own agent; a custom grouping lets one agent own several
// variables and play their joint action. Single-action variables stay at 0.
class AgentBank {
 public:
  AgentBank(const CausalGraph& graph, LearningRateMode mode, int horizon);
  AgentBank(const CausalGraph& graph, std::vector<std::vector<int>> groups,
            LearningRateMode mode, int horizon);

  int agent_count() const { return static_cast<int>(learners_.size()); }
  const std::vector<int>& group(int agent) const { return groups_[agent]; }
  const MwLearner& learner(int agent) const { return learners_[agent]; }
  int num_agent_vars() const { return static_cast<int>(sizes_.size()); }

  // Joint agent action. Agents draw in order from one generator seeded with
  // rng_seed, so a single agent reproduces MwSample(state, rng_seed).
  std::vector<int> Sample(std::uint64_t rng_seed) const;

  // For each agent, scores its own actions with the other agents fixed at
  // their realized choices and the adversary at its observed action, then
  // applies the MW step. Scoring for all agents happens against the same
  // model before any learner moves. Returns each agent's raw UCB vector.
  std::vector<std::vector<double>> Update(const ActionScorer& scorer,
                                          std::span<const int> joint_action,
                                          std::span<const int> observed_adversary,
                                          ClipMode clip = ClipMode::kUnitInterval);

 private:
  std::vector<int> sizes_;
  std::vector<std::vector<int>> groups_;
  std::vector<MwLearner> learners_;
};

// Continuous reward over agent coordinates, for the submodularity tools.
using RewardFn = std::function<double(std::span<const double>)>;

struct SubmodularityReport {
  std::int64_t pairs_checked = 0;
  std::int64_t dr_violations = 0;
  std::int64_t monotonicity_violations = 0;
  double worst_dr_gap = 0.0;
  double worst_monotonicity_gap = 0.0;
};

// Exhaustive check on the product grid: for every comparable pair x <= y,
// every coordinate i and every increment k with x + k e_i and y + k e_i on
// the grid, f(x + k e_i) - f(x) >= f(y + k e_i) - f(y) - tolerance; and
// f(x) <= f(y) + tolerance. Per-dimension values must be strictly
// increasing. Throws kGridTooLarge past max_checks inequality checks.
SubmodularityReport CheckDrSubmodular(const RewardFn& reward,
                                      const std::vector<std::vector<double>>& grid,
                                      double tolerance,
                                      std::int64_t max_checks = 50'000'000);

// Reward as a function of agent coordinates under one adversary action.
using GameRewardFn =
    std::function<double(std::span<const double> agent,
                         std::span<const double> adversary)>;

struct Curvature {
  double average = 0.0;
  double worst_case = 0.0;
};

// Average and worst-case game curvature from central-difference gradients
// at 0 and 2 * a_max (both clamped to [0, 1]). The reward must accept points
// outside its domain (a monotone extension); evaluation at -h and
// 2 * a_max + h is required. Throws kZeroBaseGradient when a gradient at 0
// vanishes.
Curvature CurvatureEstimate(const GameRewardFn& reward, int num_agent_coords,
                            const std::vector<std::vector<double>>& adversary_sequence,
                            double a_max, double step = 1e-5);

}  // namespace acbo

#endif  // ACBO_DCBO_H_
