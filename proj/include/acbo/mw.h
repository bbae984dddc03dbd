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

#ifndef ACBO_MW_H_
#define ACBO_MW_H_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "acbo/ucb_oracle.h"

namespace acbo {

// Hedge weights over a finite action set. Weights live in log space so long
// horizons never underflow; Weights() returns the normalized vector.
class MwState {
 public:
  MwState() = default;
  MwState(int num_actions, double learning_rate);

  int size() const { return static_cast<int>(log_weights_.size()); }
  double learning_rate() const { return learning_rate_; }
  void set_learning_rate(double tau) { learning_rate_ = tau; }
  std::vector<double> Weights() const;
  std::span<const double> log_weights() const { return log_weights_; }

  // w_a <- w_a * exp(tau * r_a), renormalized.
  void Apply(std::span<const double> rewards);

 private:
  std::vector<double> log_weights_;
  double learning_rate_ = 0.0;
};

// Categorical draw from the state's weights, deterministic in the seed.
int MwSample(const MwState& state, std::uint64_t rng_seed);
int SampleIndex(std::span<const double> weights, std::mt19937_64& rng);

// Returns the updated state. Rewards must lie in [0, 1] unless
// check_range is false. Throws kRewardOutOfRange.
MwState MwUpdate(const MwState& state, std::span<const double> rewards,
                 bool check_range = true);

// tau = sqrt(8 log|A| / T).
double FixedHorizonRate(std::int64_t num_actions, int horizon);

// log|A| / tau + tau * T / 8.
double HedgeRegretBound(std::int64_t num_actions, int horizon, double tau);

enum class LearningRateMode { kFixedHorizon, kDoublingTrick };
enum class ClipMode { kUnitInterval, kNone };

// MW with its learning-rate schedule. The doubling trick restarts from
// uniform weights whenever the number of rounds played reaches 2, 4, 8, ...
// and retunes tau for an epoch of that length.
class MwLearner {
 public:
  MwLearner(int num_actions, LearningRateMode mode, int horizon);

  const MwState& state() const { return state_; }
  int Sample(std::uint64_t rng_seed) const { return MwSample(state_, rng_seed); }
  void Update(std::span<const double> rewards, bool check_range = true);

 private:
  MwState state_;
  LearningRateMode mode_;
  int rounds_in_epoch_ = 0;
  int epoch_length_ = 1;
};

// ŷ = min(1, max(0, ucb)) (or the raw value for ClipMode::kNone).
std::vector<double> ClipRewards(std::span<const double> ucb, ClipMode mode);

// Scores a batch of joint agent actions against the observed adversary.
using ActionScorer =
    std::function<std::vector<double>(const std::vector<ActionProfile>&)>;

// Causal UCB scorer for one round.
ActionScorer CausalScorer(const ConfidenceModel& model,
                          const OracleSettings& settings);

// One CBO-MW update: scores every joint action in action_set against the
// observed adversary action, clips, and applies the MW step. Returns the raw
// UCB vector for logging.
std::vector<double> CboMwRound(MwLearner& learner, const ActionScorer& scorer,
                               std::span<const int> observed_adversary,
                               const std::vector<std::vector<int>>& action_set,
                               ClipMode clip = ClipMode::kUnitInterval);

// Every joint agent action of the graph, last variable fastest. Throws
// kActionSpaceTooLarge above max_actions.
std::vector<std::vector<int>> EnumerateAgentActions(const CausalGraph& graph,
                                                    std::int64_t max_actions);

}  // namespace acbo

#endif  // ACBO_MW_H_
