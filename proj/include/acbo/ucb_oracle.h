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

#ifndef ACBO_UCB_ORACLE_H_
#define ACBO_UCB_ORACLE_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "acbo/confidence.h"

namespace acbo {

// Per-node selector eta_i(z_i, a_i, a'_i) in [-1, 1] that picks one
// plausible mechanism mu_i + beta * sigma_i * eta_i out of the confidence
// tube.
//
// Constant: one value per node, kept in [-1, 1] by projection.
// Feedforward: tanh MLP with two hidden layers of `width` units and a tanh
// output; parameters are laid out as W1 (width x d, column-major), b1, W2,
// b2, w3, b3.
struct EtaFunction {
  enum class Kind { kConstant, kFeedforward };

  Kind kind = Kind::kConstant;
  int width = 16;
  std::vector<int> input_dims;
  std::vector<std::vector<double>> params;

  static EtaFunction Constant(const CausalGraph& graph, double value);
  static EtaFunction RandomConstant(const CausalGraph& graph,
                                    std::mt19937_64& rng);
  static EtaFunction RandomFeedforward(const CausalGraph& graph, int width,
                                       std::mt19937_64& rng);
  static int ParamCount(Kind kind, int input_dim, int width);

  double Evaluate(int node, std::span<const double> input) const;
};

struct OracleSettings {
  EtaFunction::Kind eta_kind = EtaFunction::Kind::kFeedforward;
  int width = 16;
  // Forced to 1 when every node is noiseless (the expectation is exact).
  int noise_samples = 32;
  int restarts = 5;
  int max_ascent_steps = 100;
  double step_size = 0.05;
  double step_decay = 0.99;
  std::uint64_t seed = 0;
};

Status ValidateOracleSettings(const OracleSettings& settings);

// Common random numbers for one oracle call: samples x node_count draws.
Eigen::MatrixXd DrawNoise(const ConfidenceModel& model, int samples,
                          std::uint64_t seed);

// Monte Carlo estimate of E[y | f~, a, a'] where every unknown node follows
// x~_i = mu_i + beta * sigma_i * eta_i + w_i under the given noise rows.
double Propagate(const ConfidenceModel& model, const EtaFunction& eta,
                 const ActionProfile& profile, const Eigen::MatrixXd& noise);

// Same value plus the gradient with respect to every eta parameter, shaped
// like eta.params.
double PropagateWithGradient(const ConfidenceModel& model,
                             const EtaFunction& eta,
                             const ActionProfile& profile,
                             const Eigen::MatrixXd& noise,
                             std::vector<std::vector<double>>* gradient);

// Optimistic reward estimate: the best of eta = 0, +1, -1 and `restarts`
// Adam ascents from random eta. Throws kNonFiniteObjective.
double Ucb(const ConfidenceModel& model, const ActionProfile& profile,
           const OracleSettings& settings);

// Ucb for many profiles in one lockstep pass. Results equal per-profile Ucb
// calls with the same settings.
std::vector<double> UcbBatch(const ConfidenceModel& model,
                             const std::vector<ActionProfile>& profiles,
                             const OracleSettings& settings);

// Exhaustive maximum of Propagate over constant eta on a grid of
// grid_resolution points in [-1, 1] per node. Throws kGraphTooLarge for more
// than 6 nodes or a resolution above 21.
double UcbBruteforce(const ConfidenceModel& model, const ActionProfile& profile,
                     int grid_resolution, const Eigen::MatrixXd& noise);

// Number of per-profile UCB evaluations on this thread since the last reset.
std::int64_t UcbCallCount();
void ResetUcbCallCount();
void RecordUcbCalls(std::int64_t count);

}  // namespace acbo

#endif  // ACBO_UCB_ORACLE_H_
