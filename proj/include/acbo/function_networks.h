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

#ifndef ACBO_FUNCTION_NETWORKS_H_
#define ACBO_FUNCTION_NETWORKS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "acbo/scm.h"

namespace acbo {

// Penny maps keep the adversary's multiplier away from 0. kRestored reads the
// (1 - 2 eps) factor as a shrink of the unit interval to [eps, 1 - eps];
// kAsPrinted multiplies by eps as well, which squeezes the adversary into a
// sliver at the low end of its box.
enum class PennyGrouping { kRestored, kAsPrinted };

// Discrete index -> continuous value of one action variable.
struct ActionMap {
  enum class Kind { kAffine, kPennyEven, kPennyOdd };
  Kind kind = Kind::kAffine;
  int k = 2;
  double c1 = 1.0;  // box width
  double c2 = 0.0;  // box centre
  double epsilon = 0.05;
  PennyGrouping grouping = PennyGrouping::kRestored;

  // ((i / (K - 1)) - 0.5) * C1 + C2 over the box [lo, hi].
  static ActionMap Affine(int k, double lo, double hi);
  // Even or odd penny map depending on K.
  static ActionMap Penny(int k, double lo, double hi,
                         PennyGrouping grouping = PennyGrouping::kRestored);
};

// Throws kIndexOutOfRange unless 0 <= discrete < K.
double MapAction(const ActionMap& map, int discrete);

struct AdversaryPolicy {
  enum class Mode { kMixedBestResponse, kUniformRandom, kFixed };
  Mode mode = Mode::kMixedBestResponse;
  double random_prob = 0.2;
  // Agent draws used for the best response when |A| exceeds the exact limit.
  int response_samples = 256;
  std::int64_t exact_limit = 4096;
  std::int64_t fixed_action = 0;  // joint adversary index for kFixed
};

Status ValidateAdversaryPolicy(const AdversaryPolicy& policy);

struct EnvOptions {
  int agent_k = 8;
  int adversary_k = 8;
  PennyGrouping penny = PennyGrouping::kRestored;
  // Truncated-Gaussian observation noise per node, in normalized units.
  double noise_sd = 0.0;
  // Node ranges come from every joint profile when there are at most
  // exhaustive_limit of them, else from random profiles drawn with the seed.
  std::int64_t exhaustive_limit = std::int64_t{1} << 22;
  int normalization_samples = 100000;
  std::uint64_t normalization_seed = 0x5eed2026;
};

// A function-network game. `scm` works in normalized node units: every node
// value, and in particular the reward, is (raw - lo) / (hi - lo) with lo, hi
// the observed raw range widened by 5% on each side. `raw_scm` is the
// original network.
struct EnvSpec {
  std::string name;
  GroundTruthScm scm;
  GroundTruthScm raw_scm;
  std::vector<ActionMap> agent_maps;
  std::vector<ActionMap> adversary_maps;
  std::vector<double> node_lo;
  std::vector<double> node_hi;
  bool normalization_exhaustive = true;
  std::uint64_t normalization_seed = 0;
  AdversaryPolicy adversary;

  const CausalGraph& graph() const { return scm.graph; }
};

// dropwave_penny, dropwave_perturb, alpine_penny, alpine_perturb,
// rosenbrock_penny, rosenbrock_perturb, ackley_penny, ackley_perturb.
const std::vector<std::string>& EnvNames();

// Throws kUnknownEnvironment, or kInvalidArgument for K < 2.
EnvSpec MakeEnv(const std::string& name, const EnvOptions& options);
EnvSpec MakeEnv(const std::string& name, int agent_k, int adversary_k);

// Sweeps the raw network for node ranges and fills env.scm with the
// normalized network (noise from options.noise_sd) and env.raw_scm with raw.
// env.name and the action maps must already be set.
EnvSpec NormalizeEnv(EnvSpec env, GroundTruthScm raw, const EnvOptions& options);

// Expected normalized reward of every (joint agent, joint adversary) pair,
// agent-major. Exact for noiseless environments, else a Monte Carlo mean.
struct RewardTable {
  std::int64_t agent_count = 0;
  std::int64_t adversary_count = 0;
  std::vector<double> values;

  double at(std::int64_t agent, std::int64_t adversary) const {
    return values[agent * adversary_count + adversary];
  }
};

// Throws kActionSpaceTooLarge past max_entries.
RewardTable BuildRewardTable(const GroundTruthScm& scm, int noise_samples = 64,
                             std::uint64_t rng_seed = 0,
                             std::int64_t max_entries = std::int64_t{1} << 26);

// The adversary's move against the agent's current mixed strategy over joint
// agent actions: uniform with probability random_prob, otherwise the
// lowest-index minimizer of E_{a ~ p} r(a, a'). Returns per-variable indices.
std::vector<int> AdversaryAct(const AdversaryPolicy& policy,
                              const CausalGraph& graph,
                              const RewardTable& table,
                              std::span<const double> agent_weights,
                              std::uint64_t rng_seed);

}  // namespace acbo

#endif  // ACBO_FUNCTION_NETWORKS_H_
