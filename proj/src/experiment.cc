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

#include "acbo/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "acbo/baselines.h"
#include "acbo/dcbo.h"
#include "json.hpp"

namespace acbo {
namespace {

using nlohmann::json;

std::uint64_t Mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Independent stream per (seed, purpose, index).
std::uint64_t StreamSeed(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
  return Mix(Mix(Mix(seed) ^ purpose) ^ index);
}

enum Purpose : std::uint64_t {
  kInitProfile = 1,
  kInitSim,
  kAgentDraw,
  kAdversaryDraw,
  kSimulate,
  kOracle,
  kSmsRandom,
};

[[noreturn]] void BadKey(const std::string& key, const std::string& why) {
  Fail(ErrorCode::kInvalidConfig, "config key '" + key + "': " + why);
}

void CheckKeys(const json& j, const std::string& where,
               std::initializer_list<const char*> allowed) {
  if (!j.is_object()) BadKey(where, "expected an object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || item.key() == a;
    if (!ok) BadKey(where.empty() ? item.key() : where + "." + item.key(), "unknown key");
  }
}

template <typename T>
void Get(const json& j, const char* key, T* out, const std::string& where = "") {
  if (!j.contains(key)) return;
  try {
    *out = j.at(key).get<T>();
  } catch (const json::exception&) {
    BadKey(where.empty() ? key : where + "." + key, "wrong type");
  }
}

std::vector<std::uint64_t> ParseSeeds(const json& j) {
  std::vector<std::uint64_t> seeds;
  if (j.is_number_unsigned() || j.is_number_integer()) return {j.get<std::uint64_t>()};
  if (j.is_array()) {
    for (const auto& s : j) {
      if (!s.is_number_integer()) BadKey("seeds", "expected integers");
      seeds.push_back(s.get<std::uint64_t>());
    }
    return seeds;
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto dots = s.find("..");
    try {
      if (dots == std::string::npos) return {std::stoull(s)};
      const std::uint64_t lo = std::stoull(s.substr(0, dots));
      const std::uint64_t hi = std::stoull(s.substr(dots + 2));
      if (hi < lo) BadKey("seeds", "empty range");
      for (std::uint64_t v = lo; v <= hi; ++v) seeds.push_back(v);
      return seeds;
    } catch (const std::logic_error&) {
      BadKey("seeds", "expected N, [..] or 'A..B'");
    }
  }
  BadKey("seeds", "expected N, [..] or 'A..B'");
}

std::string Resolve(const std::string& base, const std::string& path) {
  if (path.empty() || base.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base) / path).string();
}

std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIoError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SmsConfig ParseSmsLayoutSetting(const json& j, const std::string& base) {
  if (j.is_string()) return LoadSmsLayout(Resolve(base, j.get<std::string>()));
  if (!j.is_object()) BadKey("sms.layout", "expected a path or an object");
  if (!j.contains("synthetic")) return ParseSmsLayout(j.dump());
  CheckKeys(j, "sms.layout", {"synthetic", "trucks", "bikes_per_truck", "service_radius",
                              "horizon_days", "random_days"});
  const json& s = j.at("synthetic");
  CheckKeys(s, "sms.layout.synthetic", {"seed", "depots", "regions", "spacing", "radius"});
  std::uint64_t seed = 0;
  int depots = 20, regions = 4;
  double spacing = 4.0, radius = 1.2;
  Get(s, "seed", &seed);
  Get(s, "depots", &depots);
  Get(s, "regions", &regions);
  Get(s, "spacing", &spacing);
  Get(s, "radius", &radius);
  SmsConfig c = SynthLayout(seed, depots, regions, spacing, radius);
  Get(j, "trucks", &c.trucks);
  Get(j, "bikes_per_truck", &c.bikes_per_truck);
  Get(j, "service_radius", &c.service_radius);
  Get(j, "horizon_days", &c.horizon_days);
  Get(j, "random_days", &c.random_days);
  return c;
}

void ParseSms(const json& j, const std::string& base, SmsSettings* sms) {
  CheckKeys(j, "sms", {"layout", "trips_csv", "covariates_csv", "skip_weekends", "demand",
                       "trip_scale"});
  if (j.contains("layout")) sms->layout = ParseSmsLayoutSetting(j.at("layout"), base);
  Get(j, "trips_csv", &sms->trips_csv, "sms");
  Get(j, "covariates_csv", &sms->covariates_csv, "sms");
  sms->trips_csv = Resolve(base, sms->trips_csv);
  sms->covariates_csv = Resolve(base, sms->covariates_csv);
  Get(j, "skip_weekends", &sms->skip_weekends, "sms");
  Get(j, "trip_scale", &sms->trip_scale, "sms");
  if (j.contains("demand")) {
    const json& d = j.at("demand");
    CheckKeys(d, "sms.demand", {"seed", "days", "region_rates", "intensity", "start_spread",
                                "cross_region_prob", "popularity_skew"});
    SynthDemandOptions& o = sms->demand;
    Get(d, "seed", &o.seed, "sms.demand");
    Get(d, "days", &o.days, "sms.demand");
    Get(d, "region_rates", &o.region_rates, "sms.demand");
    Get(d, "intensity", &o.intensity, "sms.demand");
    Get(d, "start_spread", &o.start_spread, "sms.demand");
    Get(d, "cross_region_prob", &o.cross_region_prob, "sms.demand");
    Get(d, "popularity_skew", &o.popularity_skew, "sms.demand");
  }
}

void ParseOracle(const json& j, OracleSettings* o) {
  CheckKeys(j, "oracle", {"eta", "width", "noise_samples", "restarts", "max_ascent_steps",
                          "step_size", "step_decay", "seed"});
  if (j.contains("eta")) {
    const std::string eta = j.at("eta").get<std::string>();
    if (eta == "feedforward") {
      o->eta_kind = EtaFunction::Kind::kFeedforward;
    } else if (eta == "constant") {
      o->eta_kind = EtaFunction::Kind::kConstant;
    } else {
      BadKey("oracle.eta", "expected feedforward or constant");
    }
  }
  Get(j, "width", &o->width, "oracle");
  Get(j, "noise_samples", &o->noise_samples, "oracle");
  Get(j, "restarts", &o->restarts, "oracle");
  Get(j, "max_ascent_steps", &o->max_ascent_steps, "oracle");
  Get(j, "step_size", &o->step_size, "oracle");
  Get(j, "step_decay", &o->step_decay, "oracle");
  Get(j, "seed", &o->seed, "oracle");
}

void ParseBeta(const json& j, BetaSchedule* b) {
  if (j.is_number()) {
    b->kind = BetaSchedule::Kind::kConstant;
    b->constant_value = j.get<double>();
    return;
  }
  CheckKeys(j, "beta", {"kind", "value", "rkhs_bound", "delta"});
  std::string kind = "constant";
  Get(j, "kind", &kind, "beta");
  if (kind == "constant") {
    b->kind = BetaSchedule::Kind::kConstant;
  } else if (kind == "lemma1") {
    b->kind = BetaSchedule::Kind::kLemma1;
  } else {
    BadKey("beta.kind", "expected constant or lemma1");
  }
  Get(j, "value", &b->constant_value, "beta");
  Get(j, "rkhs_bound", &b->rkhs_bound, "beta");
  Get(j, "delta", &b->delta, "beta");
}

void ParseAdversary(const json& j, AdversaryPolicy* p) {
  CheckKeys(j, "adversary",
            {"mode", "random_prob", "response_samples", "exact_limit", "fixed_action"});
  if (j.contains("mode")) {
    const std::string mode = j.at("mode").get<std::string>();
    if (mode == "mixed_best_response") {
      p->mode = AdversaryPolicy::Mode::kMixedBestResponse;
    } else if (mode == "uniform_random") {
      p->mode = AdversaryPolicy::Mode::kUniformRandom;
    } else if (mode == "fixed") {
      p->mode = AdversaryPolicy::Mode::kFixed;
    } else {
      BadKey("adversary.mode", "expected mixed_best_response, uniform_random or fixed");
    }
  }
  Get(j, "random_prob", &p->random_prob, "adversary");
  Get(j, "response_samples", &p->response_samples, "adversary");
  Get(j, "exact_limit", &p->exact_limit, "adversary");
  Get(j, "fixed_action", &p->fixed_action, "adversary");
}

void ParseEnvOptions(const json& j, EnvOptions* o) {
  CheckKeys(j, "env_options", {"agent_k", "adversary_k", "penny", "noise_sd",
                               "exhaustive_limit", "normalization_samples",
                               "normalization_seed"});
  Get(j, "agent_k", &o->agent_k, "env_options");
  Get(j, "adversary_k", &o->adversary_k, "env_options");
  if (j.contains("penny")) {
    const std::string penny = j.at("penny").get<std::string>();
    if (penny == "restored") {
      o->penny = PennyGrouping::kRestored;
    } else if (penny == "as_printed") {
      o->penny = PennyGrouping::kAsPrinted;
    } else {
      BadKey("env_options.penny", "expected restored or as_printed");
    }
  }
  Get(j, "noise_sd", &o->noise_sd, "env_options");
  Get(j, "exhaustive_limit", &o->exhaustive_limit, "env_options");
  Get(j, "normalization_samples", &o->normalization_samples, "env_options");
  Get(j, "normalization_seed", &o->normalization_seed, "env_options");
}

// Probability of every joint agent action under the learner's current play.
std::vector<double> ProductWeights(const AgentBank& bank, const CausalGraph& g) {
  const std::int64_t n = JointActionCount(g.agent_action_sizes);
  std::vector<double> w(n, 1.0);
  for (std::int64_t a = 0; a < n; ++a) {
    const std::vector<int> joint = DecodeJointAction(g.agent_action_sizes, a);
    for (int k = 0; k < bank.agent_count(); ++k) {
      std::vector<int> sizes, values;
      for (int v : bank.group(k)) {
        sizes.push_back(g.agent_action_sizes[v]);
        values.push_back(joint[v]);
      }
      w[a] *= bank.learner(k).state().Weights()[EncodeJointAction(sizes, values)];
    }
  }
  return w;
}

// Per-node GPs the learner updates in place, shared with a ConfidenceModel.
struct CausalLearnerModel {
  ConfidenceModel model;
  std::vector<std::shared_ptr<GpPosterior>> gps;

  CausalLearnerModel(const CausalGraph& g, const Kernel& base, double noise_scale,
                     const std::vector<NoiseSpec>& noise) {
    model.graph = g;
    model.noise = noise;
    for (int i = 0; i < g.node_count; ++i) {
      Kernel k = base;
      k.lengthscales.assign(NodeInputDim(g, i), base.lengthscales.front());
      gps.push_back(std::make_shared<GpPosterior>(k, noise_scale));
      model.nodes.push_back({gps.back(), {}});
    }
  }

  void Observe(const ActionProfile& p, std::span<const double> node_values) {
    const CausalGraph& g = model.graph;
    const EmbeddedProfile e = Embed(g, p);
    std::vector<double> input;
    for (int i = 0; i < g.node_count; ++i) {
      input.assign(NodeInputDim(g, i), 0.0);
      AssembleNodeInput(g, i, node_values, e, input);
      gps[i]->Add(input, node_values[i]);
    }
  }

  double MaxInformationGain() const {
    double gamma = 0.0;
    for (const auto& gp : gps) gamma = std::max(gamma, gp->InformationGain());
    return gamma;
  }
};

double BetaAt(const ExperimentConfig& config, int node_count, int t, double gamma) {
  BetaSchedule b = config.beta;
  b.node_count = node_count;
  b.noise_scale = config.gp_noise;
  return b.At(t, gamma);
}

std::string JoinAction(const std::vector<int>& a) {
  if (a.empty()) return "-";
  std::string s;
  for (size_t i = 0; i < a.size(); ++i) {
    if (i) s += '-';
    s += std::to_string(a[i]);
  }
  return s;
}

std::vector<int> SplitAction(const std::string& s) {
  std::vector<int> out;
  if (s == "-" || s.empty()) return out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, '-')) out.push_back(std::stoi(part));
  return out;
}

void FinishCurves(RunLog* log) {
  double cum = 0.0;
  log->cum_reward.clear();
  for (const RoundLog& r : log->rounds) {
    cum += r.reward;
    log->cum_reward.push_back(cum);
  }
}

}  // namespace

std::vector<std::uint64_t> ParseSeedList(const std::string& text) {
  return ParseSeeds(json(text));
}

const std::vector<std::string>& AlgorithmNames() {
  static const std::vector<std::string> names = {"cbo_mw", "d_cbo_mw", "gp_mw", "d_gp_mw",
                                                 "gp_ucb", "mcbo",     "random"};
  return names;
}

Algorithm AlgorithmFromName(const std::string& name) {
  const auto& names = AlgorithmNames();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) Fail(ErrorCode::kInvalidConfig, "unknown algorithm '" + name + "'");
  return static_cast<Algorithm>(it - names.begin());
}

std::string AlgorithmName(Algorithm algorithm) {
  return AlgorithmNames()[static_cast<int>(algorithm)];
}

Status ValidateExperimentConfig(const ExperimentConfig& c) {
  auto bad = [](const std::string& m) { return Status{ErrorCode::kInvalidConfig, m}; };
  if (c.horizon < 1) return bad("horizon must be >= 1");
  if (c.seeds.empty()) return bad("at least one seed required");
  if (!(c.lengthscale > 0.0)) return bad("lengthscale must be > 0");
  if (!(c.gp_noise >= 0.0)) return bad("gp_noise must be >= 0");
  if (c.init_samples < -1) return bad("init_samples must be >= 0 (or -1)");
  if (c.reward_noise_samples < 1) return bad("reward_noise_samples must be >= 1");
  if (c.max_hindsight_actions < 1 || c.hindsight_samples < 1) {
    return bad("hindsight limits must be positive");
  }
  if (c.beta.kind == BetaSchedule::Kind::kConstant && !(c.beta.constant_value >= 0.0)) {
    return bad("beta must be >= 0");
  }
  if (c.beta.kind == BetaSchedule::Kind::kLemma1 &&
      !(c.beta.delta > 0.0 && c.beta.delta < 1.0 && c.beta.rkhs_bound >= 0.0)) {
    return bad("lemma1 beta needs 0 < delta < 1 and rkhs_bound >= 0");
  }
  Status st = ValidateOracleSettings(c.oracle);
  if (!st.ok()) return st;
  st = ValidateAdversaryPolicy(c.adversary);
  if (!st.ok()) return st;
  if (c.env == "sms") {
    if (c.algorithm != Algorithm::kDCboMw && c.algorithm != Algorithm::kDGpMw &&
        c.algorithm != Algorithm::kRandom) {
      return bad("sms supports d_cbo_mw, d_gp_mw and random");
    }
    st = ValidateSmsConfig(c.sms.layout);
    if (!st.ok()) return st;
    if (c.sms.trips_csv.empty() != c.sms.covariates_csv.empty()) {
      return bad("sms needs both trips_csv and covariates_csv, or neither");
    }
    return Status::Ok();
  }
  if (c.env == "custom") {
    if (c.custom_graph.empty()) return bad("env 'custom' needs custom_graph");
    return Status::Ok();
  }
  const auto& envs = EnvNames();
  if (std::find(envs.begin(), envs.end(), c.env) == envs.end()) {
    return {ErrorCode::kUnknownEnvironment, "unknown environment '" + c.env + "'"};
  }
  return Status::Ok();
}

ExperimentConfig ParseExperimentConfig(const std::string& json_text,
                                       const std::string& base_dir) {
  ExperimentConfig c;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kInvalidConfig, std::string("config is not valid JSON: ") + e.what());
  }
  CheckKeys(j, "", {"env", "env_options", "adversary", "custom_graph", "sms", "algorithm",
                    "horizon", "seeds", "kernel", "lengthscale", "gp_noise", "beta",
                    "learning_rate", "clip", "oracle", "init_samples",
                    "reward_noise_samples", "max_hindsight_actions", "hindsight_samples",
                    "max_joint_actions", "output", "log_ucb"});
  try {
    Get(j, "env", &c.env);
    if (j.contains("env_options")) ParseEnvOptions(j.at("env_options"), &c.env_options);
    if (j.contains("adversary")) ParseAdversary(j.at("adversary"), &c.adversary);
    if (j.contains("custom_graph")) {
      const json& g = j.at("custom_graph");
      c.custom_graph = g.is_string() ? ReadText(Resolve(base_dir, g.get<std::string>()))
                                     : g.dump();
    }
    if (j.contains("sms")) ParseSms(j.at("sms"), base_dir, &c.sms);
    if (j.contains("algorithm")) {
      c.algorithm = AlgorithmFromName(j.at("algorithm").get<std::string>());
    }
    Get(j, "horizon", &c.horizon);
    if (j.contains("seeds")) c.seeds = ParseSeeds(j.at("seeds"));
    if (j.contains("kernel")) c.kernel = KernelKindFromName(j.at("kernel").get<std::string>());
    Get(j, "lengthscale", &c.lengthscale);
    Get(j, "gp_noise", &c.gp_noise);
    if (j.contains("beta")) ParseBeta(j.at("beta"), &c.beta);
    if (j.contains("learning_rate")) {
      const std::string lr = j.at("learning_rate").get<std::string>();
      if (lr == "fixed_horizon") {
        c.learning_rate = LearningRateMode::kFixedHorizon;
      } else if (lr == "doubling") {
        c.learning_rate = LearningRateMode::kDoublingTrick;
      } else {
        BadKey("learning_rate", "expected fixed_horizon or doubling");
      }
    }
    if (j.contains("clip")) {
      const std::string clip = j.at("clip").get<std::string>();
      if (clip == "unit") {
        c.clip = ClipMode::kUnitInterval;
      } else if (clip == "none") {
        c.clip = ClipMode::kNone;
      } else {
        BadKey("clip", "expected unit or none");
      }
    }
    if (j.contains("oracle")) ParseOracle(j.at("oracle"), &c.oracle);
    Get(j, "init_samples", &c.init_samples);
    Get(j, "reward_noise_samples", &c.reward_noise_samples);
    Get(j, "max_hindsight_actions", &c.max_hindsight_actions);
    Get(j, "hindsight_samples", &c.hindsight_samples);
    Get(j, "max_joint_actions", &c.max_joint_actions);
    Get(j, "output", &c.output);
    c.output = Resolve(base_dir, c.output);
    Get(j, "log_ucb", &c.log_ucb);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kInvalidConfig, std::string("config: ") + e.what());
  }
  const Status st = ValidateExperimentConfig(c);
  if (!st.ok()) Fail(st.code, st.message);
  return c;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  return ParseExperimentConfig(ReadText(path),
                               std::filesystem::path(path).parent_path().string());
}

EnvSpec ParseCustomEnv(const std::string& json_text, const EnvOptions& options) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    Fail(ErrorCode::kInvalidConfig, std::string("custom graph: ") + e.what());
  }
  CheckKeys(j, "custom_graph", {"agent_k", "adversary_k", "noise", "nodes"});
  int agent_k = options.agent_k, adversary_k = options.adversary_k;
  Get(j, "agent_k", &agent_k, "custom_graph");
  Get(j, "adversary_k", &adversary_k, "custom_graph");
  if (agent_k < 2 || adversary_k < 2) {
    Fail(ErrorCode::kInvalidConfig, "custom graph needs K >= 2");
  }
  if (!j.contains("nodes") || !j.at("nodes").is_array() || j.at("nodes").empty()) {
    BadKey("custom_graph.nodes", "expected a non-empty array");
  }
  const json& nodes = j.at("nodes");
  const int n = static_cast<int>(nodes.size());

  EnvSpec env;
  env.name = "custom";
  CausalGraph g;
  g.node_count = n;
  std::vector<Mechanism> mechanisms;
  for (int i = 0; i < n; ++i) {
    const json& node = nodes[i];
    const std::string where = "custom_graph.nodes[" + std::to_string(i) + "]";
    CheckKeys(node, where, {"parents", "agent", "adversary", "agent_range",
                            "adversary_range", "mechanism", "weights", "bias"});
    std::vector<int> parents;
    bool agent = false, adversary = false;
    std::array<double, 2> agent_range = {0.0, 1.0}, adversary_range = {0.0, 1.0};
    std::string kind = "linear";
    std::vector<double> weights;
    double bias = 0.0;
    Get(node, "parents", &parents, where);
    Get(node, "agent", &agent, where);
    Get(node, "adversary", &adversary, where);
    Get(node, "agent_range", &agent_range, where);
    Get(node, "adversary_range", &adversary_range, where);
    Get(node, "mechanism", &kind, where);
    Get(node, "weights", &weights, where);
    Get(node, "bias", &bias, where);
    g.parents.push_back(parents);
    g.agent_inputs.emplace_back();
    g.adversary_inputs.emplace_back();
    if (agent) {
      g.agent_inputs.back().push_back(g.num_agent_vars());
      g.agent_action_sizes.push_back(agent_k);
      env.agent_maps.push_back(ActionMap::Affine(agent_k, agent_range[0], agent_range[1]));
    }
    if (adversary) {
      g.adversary_inputs.back().push_back(g.num_adversary_vars());
      g.adversary_action_sizes.push_back(adversary_k);
      env.adversary_maps.push_back(
          ActionMap::Affine(adversary_k, adversary_range[0], adversary_range[1]));
    }
    const size_t arity = parents.size() + agent + adversary;
    if (weights.empty()) weights.assign(arity, 1.0);
    if (kind != "product" && weights.size() != arity) {
      BadKey(where + ".weights", "needs one weight per input");
    }
    MechanismFn fn;
    auto gather = [](std::span<const double> p, std::span<const double> a,
                     std::span<const double> b, double* x) {
      size_t k = 0;
      for (double v : p) x[k++] = v;
      for (double v : a) x[k++] = v;
      for (double v : b) x[k++] = v;
      return k;
    };
    if (arity > 16) BadKey(where + ".parents", "at most 14 parents");
    if (kind == "linear" || kind == "sine" || kind == "negsquare") {
      const int mode = kind == "linear" ? 0 : kind == "sine" ? 1 : 2;
      fn = [gather, weights, bias, mode](auto p, auto a, auto b) {
        double x[16];
        const size_t k = gather(p, a, b, x);
        double s = 0.0;
        for (size_t q = 0; q < k; ++q) s += weights[q] * (mode == 2 ? x[q] * x[q] : x[q]);
        if (mode == 0) return s + bias;
        if (mode == 1) return std::sin(s + bias);
        return bias - s;
      };
    } else if (kind == "product") {
      fn = [gather, bias](auto p, auto a, auto b) {
        double x[16];
        const size_t k = gather(p, a, b, x);
        double s = 1.0;
        for (size_t q = 0; q < k; ++q) s *= x[q];
        return bias + s;
      };
    } else {
      BadKey(where + ".mechanism", "expected linear, product, sine or negsquare");
    }
    mechanisms.push_back({fn, static_cast<int>(parents.size()), agent ? 1 : 0,
                          adversary ? 1 : 0});
  }
  FinalizeGraph(g);

  GroundTruthScm raw;
  raw.graph = g;
  raw.mechanisms = std::move(mechanisms);
  raw.noise.assign(n, NoiseSpec::None());
  auto tables = [](const std::vector<ActionMap>& maps) {
    std::vector<std::vector<double>> out;
    for (const ActionMap& m : maps) {
      std::vector<double> v(m.k);
      for (int i = 0; i < m.k; ++i) v[i] = MapAction(m, i);
      out.push_back(std::move(v));
    }
    return out;
  };
  raw.agent_values = tables(env.agent_maps);
  raw.adversary_values = tables(env.adversary_maps);
  EnvOptions opts = options;
  opts.agent_k = agent_k;
  opts.adversary_k = adversary_k;
  EnvSpec out = NormalizeEnv(std::move(env), std::move(raw), opts);
  if (j.contains("noise")) {
    const json& nz = j.at("noise");
    CheckKeys(nz, "custom_graph.noise", {"kind", "scale"});
    std::string kind = "none";
    double scale = 0.0;
    Get(nz, "kind", &kind, "custom_graph.noise");
    Get(nz, "scale", &scale, "custom_graph.noise");
    NoiseSpec spec;
    if (kind == "none") {
      spec = NoiseSpec::None();
    } else if (kind == "truncated_gaussian") {
      spec = NoiseSpec::TruncatedGaussian(scale);
    } else if (kind == "uniform") {
      spec = NoiseSpec::Uniform(scale);
    } else {
      BadKey("custom_graph.noise.kind", "expected none, truncated_gaussian or uniform");
    }
    out.scm.noise.assign(n, spec);
    const Status st = ValidateScm(out.scm);
    if (!st.ok()) Fail(st.code, st.message);
  }
  return out;
}

EnvSpec BuildEnv(const ExperimentConfig& config) {
  EnvSpec env = config.env == "custom" ? ParseCustomEnv(config.custom_graph, config.env_options)
                                       : MakeEnv(config.env, config.env_options);
  env.adversary = config.adversary;
  return env;
}

RegretCurve HindsightRegret(const RewardTable& table,
                            std::span<const std::int64_t> agent_actions,
                            std::span<const std::int64_t> adversary_actions,
                            std::int64_t max_actions, int samples,
                            std::uint64_t rng_seed) {
  if (agent_actions.size() != adversary_actions.size()) {
    Fail(ErrorCode::kDimensionMismatch, "agent and adversary sequences differ in length");
  }
  for (size_t t = 0; t < agent_actions.size(); ++t) {
    if (agent_actions[t] < 0 || agent_actions[t] >= table.agent_count ||
        adversary_actions[t] < 0 || adversary_actions[t] >= table.adversary_count) {
      Fail(ErrorCode::kIndexOutOfRange, "logged action outside the reward table");
    }
  }
  RegretCurve curve;
  std::vector<std::int64_t> candidates;
  if (table.agent_count <= max_actions) {
    candidates.resize(table.agent_count);
    for (std::int64_t a = 0; a < table.agent_count; ++a) candidates[a] = a;
  } else {
    curve.sampled = true;
    candidates.assign(agent_actions.begin(), agent_actions.end());
    std::mt19937_64 rng(rng_seed);
    for (int s = 0; s < samples; ++s) {
      candidates.push_back(static_cast<std::int64_t>(rng() % table.agent_count));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  }
  std::vector<double> best_sum(candidates.size(), 0.0);
  double played = 0.0;
  for (size_t t = 0; t < agent_actions.size(); ++t) {
    const std::int64_t b = adversary_actions[t];
    double best = -INFINITY;
    for (size_t c = 0; c < candidates.size(); ++c) {
      best_sum[c] += table.at(candidates[c], b);
      best = std::max(best, best_sum[c]);
    }
    played += table.at(agent_actions[t], b);
    curve.regret.push_back(best - played);
  }
  return curve;
}

RunLog RunSeed(const ExperimentConfig& config, const EnvSpec& env,
               const RewardTable& table, std::uint64_t seed) {
  RunLog log;
  log.env = env.name;
  log.algorithm = AlgorithmName(config.algorithm);
  log.seed = seed;
  try {
    const CausalGraph& g = env.graph();
    const Algorithm alg = config.algorithm;
    const int horizon = config.horizon;
    const bool joint_mw = alg == Algorithm::kCboMw || alg == Algorithm::kGpMw;
    const bool distributed = alg == Algorithm::kDCboMw || alg == Algorithm::kDGpMw;
    const bool causal =
        alg == Algorithm::kCboMw || alg == Algorithm::kDCboMw || alg == Algorithm::kMcbo;
    const bool needs_joint_set = joint_mw || alg == Algorithm::kGpUcb || alg == Algorithm::kMcbo;
    const std::int64_t joint_count = JointActionCount(g.agent_action_sizes);

    std::vector<std::vector<int>> actions;
    if (needs_joint_set) actions = EnumerateAgentActions(g, config.max_joint_actions);

    Kernel base;
    base.kind = config.kernel;
    base.lengthscales = {config.lengthscale};
    std::unique_ptr<CausalLearnerModel> cm;
    if (causal) cm = std::make_unique<CausalLearnerModel>(g, base, config.gp_noise, env.scm.noise);
    std::unique_ptr<FlatGpModel> flat;
    if (alg == Algorithm::kGpMw || alg == Algorithm::kDGpMw || alg == Algorithm::kGpUcb) {
      flat = std::make_unique<FlatGpModel>(g, config.kernel, config.lengthscale,
                                           config.gp_noise, alg != Algorithm::kGpUcb);
    }
    std::unique_ptr<MwLearner> learner;
    if (joint_mw) {
      learner = std::make_unique<MwLearner>(static_cast<int>(actions.size()),
                                            config.learning_rate, horizon);
    }
    std::unique_ptr<AgentBank> bank;
    if (distributed) bank = std::make_unique<AgentBank>(g, config.learning_rate, horizon);

    auto observe = [&](const ActionProfile& p, const RoundRecord& rec) {
      if (cm) cm->Observe(p, rec.node_values);
      if (flat) flat->Observe(p, rec.reward);
    };
    auto random_profile = [&](std::mt19937_64& rng) {
      ActionProfile p;
      for (int k : g.agent_action_sizes) p.agent.push_back(static_cast<int>(rng() % k));
      for (int k : g.adversary_action_sizes) p.adversary.push_back(static_cast<int>(rng() % k));
      return p;
    };

    if (alg != Algorithm::kRandom) {
      const int init =
          config.init_samples >= 0 ? config.init_samples : 2 * g.num_agent_vars() + 1;
      for (int i = 0; i < init; ++i) {
        std::mt19937_64 rng(StreamSeed(seed, kInitProfile, i));
        const ActionProfile p = random_profile(rng);
        observe(p, SimulateRound(env.scm, p, StreamSeed(seed, kInitSim, i), -i));
      }
    }

    std::vector<double> one_hot(joint_count, 0.0);
    const std::vector<double> uniform(joint_count, 1.0 / static_cast<double>(joint_count));
    for (int t = 1; t <= horizon; ++t) {
      const double gamma = causal && config.beta.kind == BetaSchedule::Kind::kLemma1
                               ? cm->MaxInformationGain()
                               : 0.0;
      const double beta_flat =
          flat && config.beta.kind == BetaSchedule::Kind::kLemma1
              ? BetaAt(config, 1, t, flat->gp().InformationGain())
              : BetaAt(config, 1, t, 0.0);
      if (cm) cm->model.beta = BetaAt(config, g.node_count, t, gamma);
      OracleSettings oracle = config.oracle;
      oracle.seed = StreamSeed(seed ^ config.oracle.seed, kOracle, t);

      // Agent move and the mixed strategy the adversary responds to.
      ActionProfile p;
      std::span<const double> weights = uniform;
      std::vector<double> product;
      switch (alg) {
        case Algorithm::kCboMw:
        case Algorithm::kGpMw: {
          const int idx = learner->Sample(StreamSeed(seed, kAgentDraw, t));
          p.agent = actions[idx];
          weights = learner->state().Weights();
          break;
        }
        case Algorithm::kDCboMw:
        case Algorithm::kDGpMw:
          p.agent = bank->Sample(StreamSeed(seed, kAgentDraw, t));
          product = ProductWeights(*bank, g);
          weights = product;
          break;
        case Algorithm::kGpUcb:
        case Algorithm::kMcbo: {
          const int idx = alg == Algorithm::kGpUcb ? GpUcbRound(*flat, beta_flat, actions)
                                                   : McboRound(cm->model, oracle, actions);
          p.agent = actions[idx];
          std::fill(one_hot.begin(), one_hot.end(), 0.0);
          one_hot[idx] = 1.0;
          weights = one_hot;
          break;
        }
        case Algorithm::kRandom: {
          std::mt19937_64 rng(StreamSeed(seed, kAgentDraw, t));
          p.agent = random_profile(rng).agent;
          break;
        }
      }
      p.adversary = AdversaryAct(env.adversary, g, table, weights,
                                 StreamSeed(seed, kAdversaryDraw, t));
      const RoundRecord rec = SimulateRound(env.scm, p, StreamSeed(seed, kSimulate, t), t);
      observe(p, rec);

      RoundLog r;
      r.round = t;
      r.agent = p.agent;
      r.adversary = p.adversary;
      r.agent_index = EncodeJointAction(g.agent_action_sizes, p.agent);
      r.adversary_index = EncodeJointAction(g.adversary_action_sizes, p.adversary);
      r.reward = rec.reward;
      r.expected_reward = table.at(r.agent_index, r.adversary_index);

      std::vector<double> ucb;
      switch (alg) {
        case Algorithm::kCboMw:
          ucb = CboMwRound(*learner, CausalScorer(cm->model, oracle), p.adversary, actions,
                           config.clip);
          break;
        case Algorithm::kGpMw:
          ucb = GpMwRound(*learner, *flat, beta_flat, p.adversary, actions);
          break;
        case Algorithm::kDCboMw:
        case Algorithm::kDGpMw: {
          const ActionScorer scorer = alg == Algorithm::kDCboMw
                                          ? CausalScorer(cm->model, oracle)
                                          : FlatScorer(*flat, beta_flat);
          for (auto& v : bank->Update(scorer, p.agent, p.adversary, config.clip)) {
            ucb.insert(ucb.end(), v.begin(), v.end());
          }
          break;
        }
        default:
          break;
      }
      if (config.log_ucb) r.ucb = std::move(ucb);
      log.rounds.push_back(std::move(r));
    }
  } catch (const Error& e) {
    log.failed = true;
    log.error_code = e.code();
    log.error = e.what();
  } catch (const std::exception& e) {
    log.failed = true;
    log.error_code = ErrorCode::kInvalidArgument;
    log.error = e.what();
  }
  FinishCurves(&log);
  std::vector<std::int64_t> a, b;
  for (const RoundLog& r : log.rounds) {
    a.push_back(r.agent_index);
    b.push_back(r.adversary_index);
  }
  const RegretCurve curve = HindsightRegret(table, a, b, config.max_hindsight_actions,
                                            config.hindsight_samples, seed);
  log.regret = curve.regret;
  log.regret_sampled = curve.sampled;
  return log;
}

std::vector<DemandDay> SmsDemand(const SmsSettings& s) {
  if (!s.trips_csv.empty()) return LoadTripCsv(s.trips_csv, s.covariates_csv, s.skip_weekends);
  return SynthDemand(s.layout, s.demand);
}

RunLog RunSmsSeed(const ExperimentConfig& config, const std::vector<DemandDay>& demand,
                  std::uint64_t seed) {
  RunLog log;
  log.env = "sms";
  log.algorithm = AlgorithmName(config.algorithm);
  log.seed = seed;
  try {
    const SmsConfig& layout = config.sms.layout;
    const int days = std::min<int>(layout.horizon_days, static_cast<int>(demand.size()));
    if (days < 1) Fail(ErrorCode::kInvalidConfig, "no demand days to replay");
    std::vector<double> scales(layout.regions.size(), config.sms.trip_scale);
    if (!(config.sms.trip_scale > 0.0)) scales = RegionDemandScales(layout, demand);
    double total_scale = 0.0;
    for (double s : scales) total_scale += s;
    Kernel base;
    base.kind = config.kernel;
    base.lengthscales = {config.lengthscale};
    const double beta0 = BetaAt(config, 1, 1, 0.0);
    std::unique_ptr<SmsModel> model;
    if (config.algorithm == Algorithm::kDCboMw) {
      model = std::make_unique<SmsModel>(
          SmsConfidence(layout, base, config.gp_noise, beta0, scales));
    } else if (config.algorithm == Algorithm::kDGpMw) {
      model = std::make_unique<SmsModel>(
          SmsFlatModel(layout, base, config.gp_noise, beta0, total_scale));
    }
    const CausalGraph g = SmsTruckGraph(layout);
    const int learning_days = std::max(1, days - layout.random_days);
    AgentBank bank(g, config.learning_rate, learning_days);
    const int depots = static_cast<int>(layout.depots.size());
    for (int t = 0; t < days; ++t) {
      const DemandDay& day = demand[t];
      std::vector<int> alloc;
      if (!model || t < layout.random_days) {
        std::mt19937_64 rng(StreamSeed(seed, kSmsRandom, t));
        for (int k = 0; k < layout.trucks; ++k) alloc.push_back(static_cast<int>(rng() % depots));
      } else {
        alloc = bank.Sample(StreamSeed(seed, kAgentDraw, t));
      }
      const DayOutcome out = StepDay(layout, alloc, day);
      RoundLog r;
      r.round = t + 1;
      r.agent = alloc;
      r.adversary = {day.day};
      r.reward = out.total_trips;
      r.expected_reward = out.total_trips;
      if (model) {
        std::vector<int> region_trips = out.region_trips;
        if (model->region_count() == 1) {
          region_trips = {out.total_trips};
        }
        model->Observe(alloc, day.covariates, region_trips);
        if (t >= layout.random_days) {
          std::vector<double> ucb;
          for (auto& v : bank.Update(SmsScorer(*model, day.covariates), alloc, {},
                                     config.clip)) {
            ucb.insert(ucb.end(), v.begin(), v.end());
          }
          if (config.log_ucb) r.ucb = std::move(ucb);
        }
      }
      log.rounds.push_back(std::move(r));
    }
  } catch (const Error& e) {
    log.failed = true;
    log.error_code = e.code();
    log.error = e.what();
  }
  FinishCurves(&log);
  return log;
}

int WorkerThreads() {
  if (const char* env = std::getenv("ACBO_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<RunLog> RunExperiment(const ExperimentConfig& config) {
  const Status st = ValidateExperimentConfig(config);
  if (!st.ok()) Fail(st.code, st.message);
  std::vector<RunLog> logs(config.seeds.size());
  std::function<RunLog(std::uint64_t)> run;
  std::vector<DemandDay> demand;
  std::unique_ptr<EnvSpec> env;
  RewardTable table;
  if (config.env == "sms") {
    demand = SmsDemand(config.sms);
    run = [&](std::uint64_t s) { return RunSmsSeed(config, demand, s); };
  } else {
    env = std::make_unique<EnvSpec>(BuildEnv(config));
    table = BuildRewardTable(env->scm, config.reward_noise_samples, 0);
    run = [&](std::uint64_t s) { return RunSeed(config, *env, table, s); };
  }
  const int threads =
      std::min<int>(WorkerThreads(), static_cast<int>(config.seeds.size()));
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < logs.size(); i = next++) logs[i] = run(config.seeds[i]);
  };
  std::vector<std::thread> pool;
  for (int k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return logs;
}

void WriteRunCsv(const std::vector<RunLog>& logs, const std::string& path) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path);
  out << "env,algorithm,seed,round,agent_action,adversary_action,reward,expected_reward,"
         "cum_reward,regret\n";
  char buf[512];
  for (const RunLog& log : logs) {
    for (size_t t = 0; t < log.rounds.size(); ++t) {
      const RoundLog& r = log.rounds[t];
      const double regret = t < log.regret.size() ? log.regret[t] : NAN;
      std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g", r.reward, r.expected_reward,
                    log.cum_reward[t], regret);
      out << log.env << ',' << log.algorithm << ',' << log.seed << ',' << r.round << ','
          << JoinAction(r.agent) << ',' << JoinAction(r.adversary) << ',' << buf << '\n';
    }
    if (log.failed) {
      out << log.env << ',' << log.algorithm << ',' << log.seed << ",-1,error,"
          << ErrorCodeName(log.error_code) << ",nan,nan,nan,nan\n";
    }
  }
  if (!out) Fail(ErrorCode::kIoError, "failed writing " + path);
}

std::vector<RunLog> ReadRunCsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIoError, "cannot read " + path);
  std::vector<RunLog> logs;
  std::map<std::tuple<std::string, std::string, std::uint64_t>, size_t> index;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 10) {
      Fail(ErrorCode::kMalformedRow, path + " line " + std::to_string(line_no));
    }
    try {
      const auto key = std::make_tuple(f[0], f[1], std::stoull(f[2]));
      auto it = index.find(key);
      if (it == index.end()) {
        it = index.emplace(key, logs.size()).first;
        logs.emplace_back();
        logs.back().env = f[0];
        logs.back().algorithm = f[1];
        logs.back().seed = std::get<2>(key);
      }
      RunLog& log = logs[it->second];
      const int round = std::stoi(f[3]);
      if (round < 0) {
        log.failed = true;
        log.error = f[5];
        continue;
      }
      RoundLog r;
      r.round = round;
      r.agent = SplitAction(f[4]);
      r.adversary = SplitAction(f[5]);
      r.reward = std::stod(f[6]);
      r.expected_reward = std::stod(f[7]);
      log.rounds.push_back(std::move(r));
      log.cum_reward.push_back(std::stod(f[8]));
      log.regret.push_back(std::stod(f[9]));
    } catch (const std::logic_error&) {
      Fail(ErrorCode::kMalformedRow, path + " line " + std::to_string(line_no));
    }
  }
  return logs;
}

std::vector<SummaryRow> Summarize(const std::vector<RunLog>& logs) {
  std::map<std::pair<std::string, std::string>, std::vector<const RunLog*>> groups;
  for (const RunLog& log : logs) {
    if (!log.failed) groups[{log.env, log.algorithm}].push_back(&log);
  }
  std::vector<SummaryRow> rows;
  auto mean_se = [](const std::vector<double>& v) {
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x / n;
    if (v.size() < 2) return std::make_pair(mean, 0.0);
    // Shifted sums so identical values give exactly zero spread.
    double d = 0.0, dd = 0.0;
    for (double x : v) {
      d += x - v[0];
      dd += (x - v[0]) * (x - v[0]);
    }
    const double ss = std::max(0.0, dd - d * d / n);
    return std::make_pair(mean, std::sqrt(ss / (n - 1.0) / n));
  };
  for (const auto& [key, runs] : groups) {
    size_t rounds = 0;
    for (const RunLog* r : runs) rounds = std::max(rounds, r->rounds.size());
    for (size_t t = 0; t < rounds; ++t) {
      std::vector<double> regret, cum;
      for (const RunLog* r : runs) {
        if (t >= r->rounds.size()) continue;
        cum.push_back(r->cum_reward[t]);
        if (t < r->regret.size()) regret.push_back(r->regret[t]);
      }
      SummaryRow row;
      row.env = key.first;
      row.algorithm = key.second;
      row.round = static_cast<int>(t) + 1;
      row.seeds = static_cast<int>(cum.size());
      std::tie(row.cum_reward_mean, row.cum_reward_stderr) = mean_se(cum);
      if (regret.empty()) {
        row.regret_mean = row.regret_stderr = NAN;
      } else {
        std::tie(row.regret_mean, row.regret_stderr) = mean_se(regret);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void WriteSummaryCsv(const std::vector<SummaryRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIoError, "cannot write " + path);
  out << "env,algorithm,round,seeds,regret_mean,regret_stderr,cum_reward_mean,"
         "cum_reward_stderr\n";
  char buf[256];
  for (const SummaryRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g", r.regret_mean,
                  r.regret_stderr, r.cum_reward_mean, r.cum_reward_stderr);
    out << r.env << ',' << r.algorithm << ',' << r.round << ',' << r.seeds << ',' << buf
        << '\n';
  }
  if (!out) Fail(ErrorCode::kIoError, "failed writing " + path);
}

std::string SummaryPathFor(const std::string& csv_path) {
  std::filesystem::path p(csv_path);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + "_summary.csv")).string();
}

}  // namespace acbo
