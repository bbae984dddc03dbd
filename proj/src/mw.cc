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

#include "acbo/mw.h"

#include <algorithm>
#include <cmath>
#include <string>

namespace acbo {

MwState::MwState(int num_actions, double learning_rate)
    : log_weights_(num_actions, -std::log(static_cast<double>(num_actions))),
      learning_rate_(learning_rate) {
  if (num_actions < 1) {
    Fail(ErrorCode::kInvalidArgument, "MW needs at least one action");
  }
}

std::vector<double> MwState::Weights() const {
  std::vector<double> w(log_weights_.size());
  for (size_t a = 0; a < w.size(); ++a) w[a] = std::exp(log_weights_[a]);
  return w;
}

void MwState::Apply(std::span<const double> rewards) {
  if (rewards.size() != log_weights_.size()) {
    Fail(ErrorCode::kDimensionMismatch, "one reward per action required");
  }
  double top = -INFINITY;
  for (size_t a = 0; a < log_weights_.size(); ++a) {
    log_weights_[a] += learning_rate_ * rewards[a];
    top = std::max(top, log_weights_[a]);
  }
  double total = 0.0;
  for (double lw : log_weights_) total += std::exp(lw - top);
  const double norm = top + std::log(total);
  for (double& lw : log_weights_) lw -= norm;
}

int SampleIndex(std::span<const double> weights, std::mt19937_64& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (size_t a = 0; a < weights.size(); ++a) {
    if (u < weights[a]) return static_cast<int>(a);
    u -= weights[a];
  }
  // Rounding can leave u just above the last cumulative weight.
  for (size_t a = weights.size(); a-- > 0;) {
    if (weights[a] > 0.0) return static_cast<int>(a);
  }
  return 0;
}

int MwSample(const MwState& state, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::vector<double> w = state.Weights();
  return SampleIndex(w, rng);
}

MwState MwUpdate(const MwState& state, std::span<const double> rewards,
                 bool check_range) {
  if (check_range) {
    for (size_t a = 0; a < rewards.size(); ++a) {
      if (!(rewards[a] >= 0.0 && rewards[a] <= 1.0)) {
        Fail(ErrorCode::kRewardOutOfRange,
             "reward " + std::to_string(rewards[a]) + " of action " +
                 std::to_string(a) + " outside [0, 1]");
      }
    }
  }
  MwState next = state;
  next.Apply(rewards);
  return next;
}

double FixedHorizonRate(std::int64_t num_actions, int horizon) {
  if (horizon < 1) Fail(ErrorCode::kInvalidArgument, "horizon must be >= 1");
  return std::sqrt(8.0 * std::log(static_cast<double>(num_actions)) / horizon);
}

double HedgeRegretBound(std::int64_t num_actions, int horizon, double tau) {
  if (num_actions < 1 || horizon < 1 || !(tau > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "bound needs positive arguments");
  }
  return std::log(static_cast<double>(num_actions)) / tau + tau * horizon / 8.0;
}

MwLearner::MwLearner(int num_actions, LearningRateMode mode, int horizon)
    : mode_(mode) {
  if (horizon < 1) Fail(ErrorCode::kInvalidArgument, "horizon must be >= 1");
  epoch_length_ = mode == LearningRateMode::kFixedHorizon ? horizon : 1;
  state_ = MwState(num_actions, FixedHorizonRate(num_actions, epoch_length_));
}

void MwLearner::Update(std::span<const double> rewards, bool check_range) {
  state_ = MwUpdate(state_, rewards, check_range);
  ++rounds_in_epoch_;
  if (mode_ == LearningRateMode::kDoublingTrick &&
      rounds_in_epoch_ == epoch_length_) {
    epoch_length_ *= 2;
    rounds_in_epoch_ = 0;
    state_ = MwState(state_.size(), FixedHorizonRate(state_.size(), epoch_length_));
  }
}

std::vector<double> ClipRewards(std::span<const double> ucb, ClipMode mode) {
  std::vector<double> out(ucb.begin(), ucb.end());
  if (mode == ClipMode::kUnitInterval) {
    for (double& v : out) v = std::clamp(v, 0.0, 1.0);
  }
  return out;
}

ActionScorer CausalScorer(const ConfidenceModel& model,
                          const OracleSettings& settings) {
  return [&model, settings](const std::vector<ActionProfile>& profiles) {
    return UcbBatch(model, profiles, settings);
  };
}

std::vector<double> CboMwRound(MwLearner& learner, const ActionScorer& scorer,
                               std::span<const int> observed_adversary,
                               const std::vector<std::vector<int>>& action_set,
                               ClipMode clip) {
  if (static_cast<int>(action_set.size()) != learner.state().size()) {
    Fail(ErrorCode::kDimensionMismatch, "action set size != number of weights");
  }
  std::vector<ActionProfile> profiles;
  profiles.reserve(action_set.size());
  std::vector<int> adversary(observed_adversary.begin(), observed_adversary.end());
  for (const auto& a : action_set) profiles.push_back({a, adversary});
  std::vector<double> ucb = scorer(profiles);
  learner.Update(ClipRewards(ucb, clip), clip != ClipMode::kNone);
  return ucb;
}

std::vector<std::vector<int>> EnumerateAgentActions(const CausalGraph& graph,
                                                    std::int64_t max_actions) {
  std::int64_t count = JointActionCount(graph.agent_action_sizes);
  if (count > max_actions) {
    Fail(ErrorCode::kActionSpaceTooLarge,
         "joint action space has " + std::to_string(count) + " actions");
  }
  std::vector<std::vector<int>> out;
  out.reserve(count);
  for (std::int64_t k = 0; k < count; ++k) {
    out.push_back(DecodeJointAction(graph.agent_action_sizes, k));
  }
  return out;
}

}  // namespace acbo
