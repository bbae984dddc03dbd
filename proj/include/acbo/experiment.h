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

#ifndef ACBO_EXPERIMENT_H_
#define ACBO_EXPERIMENT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "acbo/function_networks.h"
#include "acbo/mw.h"
#include "acbo/sms.h"

namespace acbo {

enum class Algorithm { kCboMw, kDCboMw, kGpMw, kDGpMw, kGpUcb, kMcbo, kRandom };

// cbo_mw, d_cbo_mw, gp_mw, d_gp_mw, gp_ucb, mcbo, random.
const std::vector<std::string>& AlgorithmNames();
Algorithm AlgorithmFromName(const std::string& name);  // throws kInvalidConfig
std::string AlgorithmName(Algorithm algorithm);

// Bike-sharing runs. Demand comes from the trip/covariate CSVs when both
// paths are set, else from SynthDemand.
struct SmsSettings {
  SmsConfig layout;
  std::string trips_csv;
  std::string covariates_csv;
  bool skip_weekends = false;
  SynthDemandOptions demand;
  // Trips per region per day that map to a normalized value of 1; <= 0 uses
  // RegionDemandScales on the demand data. The flat model's scale is the sum.
  double trip_scale = 0.0;
};

struct ExperimentConfig {
  // A function-network name, "custom" (network in custom_graph) or "sms".
  std::string env = "dropwave_penny";
  EnvOptions env_options;
  AdversaryPolicy adversary;
  std::string custom_graph;  // JSON text, see ParseCustomEnv
  SmsSettings sms;

  Algorithm algorithm = Algorithm::kCboMw;
  int horizon = 100;
  std::vector<std::uint64_t> seeds = {0};

  Kernel::Kind kernel = Kernel::Kind::kRbf;
  double lengthscale = 0.2;
  double gp_noise = 0.01;
  BetaSchedule beta;
  LearningRateMode learning_rate = LearningRateMode::kFixedHorizon;
  ClipMode clip = ClipMode::kUnitInterval;
  OracleSettings oracle;

  // Random profiles observed before round 1; -1 means 2m + 1 for m agent
  // action variables.
  int init_samples = -1;
  // Noise draws per table entry for noisy environments.
  int reward_noise_samples = 64;
  // Hindsight regret enumerates every joint agent action up to this many,
  // then falls back to the played actions plus hindsight_samples random ones.
  std::int64_t max_hindsight_actions = 100000;
  int hindsight_samples = 2000;
  // Joint agent actions the MW learners may enumerate.
  std::int64_t max_joint_actions = 1 << 16;

  std::string output = "runs.csv";
  bool log_ucb = false;
};

// "7" or "0..9" (inclusive). Throws kInvalidConfig.
std::vector<std::uint64_t> ParseSeedList(const std::string& text);

Status ValidateExperimentConfig(const ExperimentConfig& config);

// JSON keys mirror the struct fields; see README for the schema. Throws
// kInvalidConfig with the offending key. Relative data paths resolve against
// base_dir (the config file's directory when loading from disk).
ExperimentConfig ParseExperimentConfig(const std::string& json_text,
                                       const std::string& base_dir = "");
ExperimentConfig LoadExperimentConfig(const std::string& path);

// User-defined network:
// {"agent_k": 4, "adversary_k": 4,
//  "noise": {"kind": "none" | "truncated_gaussian" | "uniform", "scale": s},
//  "nodes": [{"parents": [..], "agent": true, "adversary": false,
//             "agent_range": [lo, hi], "adversary_range": [lo, hi],
//             "mechanism": "linear" | "product" | "sine" | "negsquare",
//             "weights": [..], "bias": b}, ...]}
// Every node owns at most one agent and one adversary variable. A mechanism
// sees [parent values..., agent value, adversary value] (only the wired
// ones): linear is w.x + b, product is b + prod x, sine is sin(w.x + b) and
// negsquare is b - sum w_j x_j^2. The last node is the reward.
EnvSpec ParseCustomEnv(const std::string& json_text, const EnvOptions& options);

// Named function network or custom network of the config.
EnvSpec BuildEnv(const ExperimentConfig& config);

struct RoundLog {
  int round = 0;  // 1-based
  std::vector<int> agent;
  std::vector<int> adversary;
  std::int64_t agent_index = 0;      // joint index, last variable fastest
  std::int64_t adversary_index = 0;
  double reward = 0.0;               // realized
  double expected_reward = 0.0;      // r(a_t, a'_t)
  std::vector<double> ucb;           // learner's scores, when logged
};

struct RunLog {
  std::string env;
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<RoundLog> rounds;
  std::vector<double> cum_reward;
  std::vector<double> regret;
  bool regret_sampled = false;
  bool failed = false;
  ErrorCode error_code = ErrorCode::kOk;
  std::string error;
};

struct RegretCurve {
  std::vector<double> regret;
  bool sampled = false;  // comparator restricted to a sampled action set
};

// R(t) = max_a sum_{s<=t} r(a, a'_s) - sum_{s<=t} r(a_s, a'_s) for every
// prefix t, with the comparator maximized separately per prefix.
RegretCurve HindsightRegret(const RewardTable& table,
                            std::span<const std::int64_t> agent_actions,
                            std::span<const std::int64_t> adversary_actions,
                            std::int64_t max_actions = 100000,
                            int samples = 2000, std::uint64_t rng_seed = 0);

// One seed on a prepared environment and its reward table. Module errors end
// the run early and are recorded in the log.
RunLog RunSeed(const ExperimentConfig& config, const EnvSpec& env,
               const RewardTable& table, std::uint64_t seed);

// One seed of the bike-sharing experiment. Rounds are days: reward and
// expected_reward are the fulfilled trips, agent is the truck allocation and
// adversary holds the day index; regret is left empty.
RunLog RunSmsSeed(const ExperimentConfig& config, const std::vector<DemandDay>& demand,
                  std::uint64_t seed);
std::vector<DemandDay> SmsDemand(const SmsSettings& settings);

// Every seed of the config, in seed order. Seeds run on up to
// WorkerThreads() threads.
std::vector<RunLog> RunExperiment(const ExperimentConfig& config);

// ACBO_THREADS when set to a positive integer, else the hardware count.
int WorkerThreads();

// env,algorithm,seed,round,agent_action,adversary_action,reward,
// expected_reward,cum_reward,regret. Actions are per-variable indices joined
// by '-'. A failed seed adds a row with round -1, agent_action "error" and
// the error code name as adversary_action. Throws kIoError.
void WriteRunCsv(const std::vector<RunLog>& logs, const std::string& path);
std::vector<RunLog> ReadRunCsv(const std::string& path);

// Per (env, algorithm, round): seeds, mean and standard error of regret and
// cumulative reward across successful seeds.
struct SummaryRow {
  std::string env;
  std::string algorithm;
  int round = 0;
  int seeds = 0;
  double regret_mean = 0.0;
  double regret_stderr = 0.0;
  double cum_reward_mean = 0.0;
  double cum_reward_stderr = 0.0;
};
std::vector<SummaryRow> Summarize(const std::vector<RunLog>& logs);
void WriteSummaryCsv(const std::vector<SummaryRow>& rows, const std::string& path);

// "runs.csv" -> "runs_summary.csv".
std::string SummaryPathFor(const std::string& csv_path);

}  // namespace acbo

#endif  // ACBO_EXPERIMENT_H_
