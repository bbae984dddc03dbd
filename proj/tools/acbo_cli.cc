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

// Command-line front end: run experiments, recompute regret, aggregate
// curves for plotting and probe submodularity.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "CLI11.hpp"
#include "acbo/dcbo.h"
#include "acbo/experiment.h"

namespace {

using namespace acbo;

int Run(const std::string& config_path, const std::string& seeds, const std::string& out,
        const std::string& algorithm, int horizon) {
  ExperimentConfig merged = LoadExperimentConfig(config_path);
  if (!seeds.empty()) merged.seeds = ParseSeedList(seeds);
  if (!algorithm.empty()) merged.algorithm = AlgorithmFromName(algorithm);
  if (horizon > 0) merged.horizon = horizon;
  if (!out.empty()) {
    std::filesystem::path p(out);
    if (p.extension() != ".csv") {
      std::filesystem::create_directories(p);
      p /= merged.env + "_" + AlgorithmName(merged.algorithm) + ".csv";
    }
    merged.output = p.string();
  }
  const std::vector<RunLog> logs = RunExperiment(merged);
  WriteRunCsv(logs, merged.output);
  WriteSummaryCsv(Summarize(logs), SummaryPathFor(merged.output));
  int failures = 0;
  for (const RunLog& log : logs) {
    if (log.failed) {
      ++failures;
      std::cerr << "seed " << log.seed << " failed: " << log.error << "\n";
      continue;
    }
    std::printf("seed %llu: rounds=%zu cum_reward=%.4f", (unsigned long long)log.seed,
                log.rounds.size(), log.cum_reward.empty() ? 0.0 : log.cum_reward.back());
    if (!log.regret.empty()) {
      std::printf(" regret=%.4f%s", log.regret.back(), log.regret_sampled ? " (sampled)" : "");
    }
    std::printf("\n");
  }
  std::printf("wrote %s and %s\n", merged.output.c_str(),
              SummaryPathFor(merged.output).c_str());
  return failures == 0 ? 0 : 2;
}

int Regret(const std::string& config_path, const std::string& log_path) {
  const ExperimentConfig config = LoadExperimentConfig(config_path);
  if (config.env == "sms") {
    std::cerr << "regret is undefined for the bike-sharing environment\n";
    return 1;
  }
  const EnvSpec env = BuildEnv(config);
  const RewardTable table = BuildRewardTable(env.scm, config.reward_noise_samples, 0);
  const CausalGraph& g = env.graph();
  std::printf("seed,rounds,regret,regret_per_round,sampled\n");
  for (const RunLog& log : ReadRunCsv(log_path)) {
    if (log.failed || log.rounds.empty()) continue;
    std::vector<std::int64_t> a, b;
    for (const RoundLog& r : log.rounds) {
      a.push_back(EncodeJointAction(g.agent_action_sizes, r.agent));
      b.push_back(EncodeJointAction(g.adversary_action_sizes, r.adversary));
    }
    const RegretCurve c = HindsightRegret(table, a, b, config.max_hindsight_actions,
                                          config.hindsight_samples, log.seed);
    std::printf("%llu,%zu,%.6f,%.6f,%d\n", (unsigned long long)log.seed, a.size(),
                c.regret.back(), c.regret.back() / a.size(), c.sampled ? 1 : 0);
  }
  return 0;
}

int PlotData(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<RunLog> logs;
  for (const std::string& path : inputs) {
    for (RunLog& log : ReadRunCsv(path)) logs.push_back(std::move(log));
  }
  const auto rows = Summarize(logs);
  if (out.empty() || out == "-") {
    std::printf("env,algorithm,round,seeds,regret_mean,regret_stderr,cum_reward_mean,"
                "cum_reward_stderr\n");
    for (const SummaryRow& r : rows) {
      std::printf("%s,%s,%d,%d,%.12g,%.12g,%.12g,%.12g\n", r.env.c_str(),
                  r.algorithm.c_str(), r.round, r.seeds, r.regret_mean, r.regret_stderr,
                  r.cum_reward_mean, r.cum_reward_stderr);
    }
  } else {
    WriteSummaryCsv(rows, out);
  }
  return 0;
}

int CheckSubmodular(const std::string& builtin, int dims, const std::string& env_name,
                    int points, int adversary, double tol) {
  RewardFn f;
  GameRewardFn game;
  std::vector<std::vector<double>> grid;
  std::vector<double> axis(points);
  for (int i = 0; i < points; ++i) axis[i] = i / double(points - 1);
  if (!env_name.empty()) {
    const EnvSpec env = MakeEnv(env_name, points, std::max(2, adversary + 1));
    const CausalGraph& g = env.graph();
    dims = g.num_agent_vars();
    const std::vector<int> adv = DecodeJointAction(g.adversary_action_sizes, adversary);
    auto scm = std::make_shared<GroundTruthScm>(env.scm);
    f = [scm, adv, points](std::span<const double> x) {
      ActionProfile p{{}, adv};
      for (double v : x) p.agent.push_back(static_cast<int>(std::lround(v * (points - 1))));
      return ExpectedReward(*scm, p, 1);
    };
  } else if (builtin == "coverage") {
    game = [](std::span<const double> a, std::span<const double>) {
      double miss = 1.0;
      for (double v : a) miss *= 1.0 - v;
      return 1.0 - miss;
    };
  } else if (builtin == "squares") {
    game = [](std::span<const double> a, std::span<const double>) {
      double s = 0.0;
      for (double v : a) s += v * v;
      return s;
    };
  } else if (builtin == "linear") {
    game = [](std::span<const double> a, std::span<const double>) {
      double s = 0.0;
      for (size_t i = 0; i < a.size(); ++i) s += (i + 1.0) * a[i];
      return s;
    };
  } else {
    std::cerr << "unknown builtin '" << builtin << "' (coverage, squares, linear)\n";
    return 1;
  }
  if (game) {
    f = [game](std::span<const double> x) { return game(x, {}); };
  }
  grid.assign(dims, axis);
  const SubmodularityReport r = CheckDrSubmodular(f, grid, tol);
  std::printf("pairs_checked=%lld dr_violations=%lld monotonicity_violations=%lld "
              "worst_dr_gap=%.3g worst_monotonicity_gap=%.3g\n",
              (long long)r.pairs_checked, (long long)r.dr_violations,
              (long long)r.monotonicity_violations, r.worst_dr_gap,
              r.worst_monotonicity_gap);
  if (game) {
    try {
      const Curvature c = CurvatureEstimate(game, dims, {{}}, 0.5);
      std::printf("curvature average=%.6f worst_case=%.6f\n", c.average, c.worst_case);
    } catch (const Error& e) {
      std::printf("curvature unavailable: %s\n", e.what());
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
#if defined(__GLIBC__)
  // Oracle buffers are reallocated every round; keep them off mmap.
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
#endif
  CLI::App app{"Adversarial causal Bayesian optimization experiments"};
  app.require_subcommand(1);

  std::string config, seeds, out, algorithm, log_path;
  int horizon = 0;
  auto* run = app.add_subcommand("run", "Run an experiment config");
  run->add_option("--config", config, "experiment JSON")->required()->check(CLI::ExistingFile);
  run->add_option("--seeds", seeds, "seed range A..B or single seed");
  run->add_option("--out", out, "output directory or .csv path");
  run->add_option("--algorithm", algorithm, "override the config's algorithm");
  run->add_option("--horizon", horizon, "override the horizon");

  auto* regret = app.add_subcommand("regret", "Recompute hindsight regret from a run CSV");
  regret->add_option("--config", config, "experiment JSON")->required()->check(CLI::ExistingFile);
  regret->add_option("--log", log_path, "run CSV")->required()->check(CLI::ExistingFile);

  std::vector<std::string> inputs;
  auto* plot = app.add_subcommand("plot-data", "Mean and stderr curves per algorithm");
  plot->add_option("--in", inputs, "run CSVs")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", out, "summary CSV (stdout when omitted)");

  std::string builtin = "coverage", env_name;
  int dims = 3, points = 5, adversary = 0;
  double tol = 1e-9;
  auto* sub = app.add_subcommand("check-submodular", "DR-submodularity and curvature probe");
  sub->add_option("--builtin", builtin, "coverage, squares or linear");
  sub->add_option("--dims", dims, "agent coordinates for builtins")->check(CLI::Range(1, 8));
  sub->add_option("--env", env_name, "function network (agent actions on the grid)");
  sub->add_option("--points", points, "grid points per coordinate")->check(CLI::Range(2, 64));
  sub->add_option("--adversary", adversary, "joint adversary index for --env");
  sub->add_option("--tol", tol, "tolerance");

  auto* list = app.add_subcommand("list-envs", "List function-network environments");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return Run(config, seeds, out, algorithm, horizon);
    if (*regret) return Regret(config, log_path);
    if (*plot) return PlotData(inputs, out);
    if (*sub) return CheckSubmodular(builtin, dims, env_name, points, adversary, tol);
    if (*list) {
      std::printf("name,nodes,agent_vars,adversary_vars\n");
      for (const std::string& name : EnvNames()) {
        const EnvSpec env = MakeEnv(name, 2, 2);
        std::printf("%s,%d,%d,%d\n", name.c_str(), env.graph().node_count,
                    env.graph().num_agent_vars(), env.graph().num_adversary_vars());
      }
      std::printf("custom (see README)\nsms (bike sharing)\n");
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error [" << ErrorCodeName(e.code()) << "]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
