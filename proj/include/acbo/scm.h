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

#ifndef ACBO_SCM_H_
#define ACBO_SCM_H_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "acbo/graph.h"

namespace acbo {

// Bounded zero-mean noise with a known distribution.
struct NoiseSpec {
  enum class Kind { kNone, kTruncatedGaussian, kUniform };

  Kind kind = Kind::kNone;
  // Standard deviation before truncation for kTruncatedGaussian, half-width
  // for kUniform. Must lie in [0, 1] for kUniform.
  double scale = 0.0;

  static NoiseSpec None() { return {}; }
  static NoiseSpec TruncatedGaussian(double sd) {
    return {Kind::kTruncatedGaussian, sd};
  }
  static NoiseSpec Uniform(double half_width) {
    return {Kind::kUniform, half_width};
  }

  bool is_none() const { return kind == Kind::kNone || scale == 0.0; }
  // Draws a value in [-1, 1].
  double Sample(std::mt19937_64& rng) const;
};

// f_i(z_i, a_i, a'_i): parent values, mapped agent values and mapped
// adversary values of the variables wired into the node.
using MechanismFn =
    std::function<double(std::span<const double> parents,
                         std::span<const double> agent,
                         std::span<const double> adversary)>;

struct Mechanism {
  MechanismFn fn;
  // Expected input counts; -1 skips the check.
  int num_parents = -1;
  int num_agent = -1;
  int num_adversary = -1;
};

// Ground-truth structural causal model: the hidden simulator truth.
//
// Action indices are mapped to continuous values through per-variable
// tables owned by the environment; an empty table maps index i of a size-K
// variable to i / (K - 1).
struct GroundTruthScm {
  CausalGraph graph;
  std::vector<Mechanism> mechanisms;
  std::vector<NoiseSpec> noise;
  std::vector<std::vector<double>> agent_values;
  std::vector<std::vector<double>> adversary_values;

  bool noiseless() const;
  double AgentValue(int var, int index) const;
  double AdversaryValue(int var, int index) const;
};

Status ValidateScm(const GroundTruthScm& scm);

struct RoundRecord {
  int round = 0;
  ActionProfile profile;
  std::vector<double> node_values;
  double reward = 0.0;
};

// Evaluates nodes in topological order with explicit per-node noise.
std::vector<double> EvaluateScm(const GroundTruthScm& scm,
                                const ActionProfile& profile,
                                std::span<const double> noise);

// x_i = f_i(z_i, a_i, a'_i) + w_i with noise drawn from rng_seed; throws
// kInvalidProfile.
RoundRecord SimulateRound(const GroundTruthScm& scm,
                          const ActionProfile& profile, std::uint64_t rng_seed,
                          int round = 0);

// E[y | a, a'], exact for noiseless models and a Monte Carlo average over
// num_noise_samples draws otherwise.
double ExpectedReward(const GroundTruthScm& scm, const ActionProfile& profile,
                      int num_noise_samples, std::uint64_t rng_seed = 0);

}  // namespace acbo

#endif  // ACBO_SCM_H_
