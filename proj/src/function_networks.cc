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

#include "acbo/function_networks.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>

#include "acbo/mw.h"

namespace acbo {
namespace {

struct NodeDef {
  std::vector<int> parents;
  std::vector<int> agent;
  std::vector<int> adversary;
  MechanismFn fn;
};

struct Network {
  std::vector<NodeDef> nodes;
  int agent_vars = 0;
  double agent_lo = 0.0, agent_hi = 1.0;
  int adversary_vars = 0;
  double adversary_lo = 0.0, adversary_hi = 1.0;
  bool penny = false;
};

Network Net(int agent_vars, double agent_lo, double agent_hi, int adversary_vars,
            double adversary_lo, double adversary_hi, bool penny) {
  Network n;
  n.agent_vars = agent_vars;
  n.agent_lo = agent_lo;
  n.agent_hi = agent_hi;
  n.adversary_vars = adversary_vars;
  n.adversary_lo = adversary_lo;
  n.adversary_hi = adversary_hi;
  n.penny = penny;
  return n;
}

double Rosen(double u, double v) {
  return -100.0 * (v - u * u) * (v - u * u) - (1.0 - u) * (1.0 - u) + 10.0;
}

double AlpineFactor(double a) { return -std::sqrt(a) * std::sin(a); }

double DropwaveHead(double x) {
  return std::cos(3.0 * x) / (2.0 + 0.5 * x * x);
}

Network DropwavePenny() {
  Network n = Net(2, 0.0, 2.0, 1, -1.0, 1.0, true);
  n.nodes.push_back({{}, {0, 1}, {}, [](auto, auto a, auto) {
                       return std::hypot(a[0], a[1]);
                     }});
  n.nodes.push_back({{0}, {}, {0}, [](auto p, auto, auto adv) {
                       return DropwaveHead(p[0]) * adv[0];
                     }});
  return n;
}

Network DropwavePerturb() {
  Network n = Net(2, -10.24, 10.24, 1, -10.24 / 5, 10.24 / 5, false);
  n.nodes.push_back({{}, {0, 1}, {0}, [](auto, auto a, auto adv) {
                       return std::hypot(a[0] - adv[0], a[1]);
                     }});
  n.nodes.push_back({{0}, {}, {}, [](auto p, auto, auto) {
                       return DropwaveHead(p[0]);
                     }});
  return n;
}

Network AlpinePenny() {
  // The adversary owns the third factor; the agent owns the other three.
  Network n = Net(3, 0.0, 10.0, 1, 1.0, 11.0, true);
  n.nodes.push_back({{}, {0}, {}, [](auto, auto a, auto) {
                       return AlpineFactor(a[0]);
                     }});
  n.nodes.push_back({{0}, {1}, {}, [](auto p, auto a, auto) {
                       return AlpineFactor(a[0]) * p[0];
                     }});
  n.nodes.push_back({{1}, {}, {0}, [](auto p, auto, auto adv) {
                       return AlpineFactor(adv[0]) * p[0];
                     }});
  n.nodes.push_back({{2}, {2}, {}, [](auto p, auto a, auto) {
                       return AlpineFactor(a[0]) * p[0];
                     }});
  return n;
}

Network AlpinePerturb() {
  Network n = Net(4, 0.0, 10.0, 3, 0.0, 2.0, false);
  n.nodes.push_back({{}, {0}, {0}, [](auto, auto a, auto adv) {
                       return AlpineFactor(a[0] + adv[0]);
                     }});
  for (int i = 1; i < 3; ++i) {
    n.nodes.push_back({{i - 1}, {i}, {i}, [](auto p, auto a, auto adv) {
                         return AlpineFactor(a[0] + adv[0]) * p[0];
                       }});
  }
  n.nodes.push_back({{2}, {3}, {}, [](auto p, auto a, auto) {
                       return AlpineFactor(a[0]) * p[0];
                     }});
  return n;
}

Network RosenbrockPenny() {
  Network n = Net(4, 0.0, 1.0, 2, 0.0, 1.0, true);
  n.nodes.push_back({{}, {0, 1}, {}, [](auto, auto a, auto) {
                       return Rosen(a[0], a[1]);
                     }});
  n.nodes.push_back({{0}, {1, 2}, {0}, [](auto p, auto a, auto adv) {
                       return (Rosen(a[0], a[1]) + p[0]) * adv[0];
                     }});
  n.nodes.push_back({{1}, {2, 3}, {1}, [](auto p, auto a, auto adv) {
                       return (Rosen(a[0], a[1]) + p[0]) * adv[0];
                     }});
  return n;
}

Network RosenbrockPerturb() {
  // Each adversary variable perturbs one shared agent variable everywhere it
  // is read: a'_0 shifts a_1 (read by X_0 and X_1), a'_1 shifts a_2 (read by
  // X_1 and Y).
  Network n = Net(4, -2.0, 2.0, 2, -1.0, 1.0, false);
  n.nodes.push_back({{}, {0, 1}, {0}, [](auto, auto a, auto adv) {
                       return Rosen(a[0], a[1] + adv[0]);
                     }});
  n.nodes.push_back({{0}, {1, 2}, {0, 1}, [](auto p, auto a, auto adv) {
                       return Rosen(a[0] + adv[0], a[1] + adv[1]) + p[0];
                     }});
  n.nodes.push_back({{1}, {2, 3}, {1}, [](auto p, auto a, auto adv) {
                       return Rosen(a[0] + adv[0], a[1]) + p[0];
                     }});
  return n;
}

double AckleySquares(std::span<const double> a, std::span<const double> shift) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double v = a[i] + (i < shift.size() ? shift[i] : 0.0);
    s += v * v;
  }
  return s / 4.0;
}

double AckleyCosines(std::span<const double> a, std::span<const double> shift) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double v = a[i] + (i < shift.size() ? shift[i] : 0.0);
    s += std::cos(2.0 * std::numbers::pi * v);
  }
  return s / 4.0;
}

Network AckleyPenny() {
  Network n = Net(4, -2.0, 2.0, 1, -1.0, 1.0, true);
  n.nodes.push_back({{}, {0, 1, 2, 3}, {}, [](auto, auto a, auto adv) {
                       return AckleySquares(a, adv);
                     }});
  n.nodes.push_back({{}, {0, 1, 2, 3}, {}, [](auto, auto a, auto adv) {
                       return AckleyCosines(a, adv);
                     }});
  n.nodes.push_back({{0, 1}, {}, {0}, [](auto p, auto, auto adv) {
                       return 20.0 * adv[0] * std::exp(-0.2 * std::sqrt(p[0])) +
                              std::exp(p[1]);
                     }});
  return n;
}

Network AckleyPerturb() {
  Network n = Net(4, -2.0, 2.0, 2, -1.0, 1.0, false);
  n.nodes.push_back({{}, {0, 1, 2, 3}, {0, 1}, [](auto, auto a, auto adv) {
                       return AckleySquares(a, adv);
                     }});
  n.nodes.push_back({{}, {0, 1, 2, 3}, {0, 1}, [](auto, auto a, auto adv) {
                       return AckleyCosines(a, adv);
                     }});
  n.nodes.push_back({{0, 1}, {}, {}, [](auto p, auto, auto) {
                       return 20.0 * std::exp(-0.2 * std::sqrt(p[0])) + std::exp(p[1]);
                     }});
  return n;
}

const std::map<std::string, Network (*)()>& Registry() {
  static const std::map<std::string, Network (*)()> registry = {
      {"dropwave_penny", DropwavePenny},     {"dropwave_perturb", DropwavePerturb},
      {"alpine_penny", AlpinePenny},         {"alpine_perturb", AlpinePerturb},
      {"rosenbrock_penny", RosenbrockPenny}, {"rosenbrock_perturb", RosenbrockPerturb},
      {"ackley_penny", AckleyPenny},         {"ackley_perturb", AckleyPerturb},
  };
  return registry;
}

// Raw node values of every profile in the sweep, folded into per-node ranges.
void ObserveRanges(const GroundTruthScm& raw, const EnvOptions& options,
                   EnvSpec* env) {
  const CausalGraph& g = raw.graph;
  const int n = g.node_count;
  std::vector<double> lo(n, INFINITY), hi(n, -INFINITY);
  const std::vector<double> zero(n, 0.0);
  auto fold = [&](const ActionProfile& p) {
    const std::vector<double> x = EvaluateScm(raw, p, zero);
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(x[i])) {
        Fail(ErrorCode::kNonFiniteObjective, env->name + " produced a non-finite value");
      }
      lo[i] = std::min(lo[i], x[i]);
      hi[i] = std::max(hi[i], x[i]);
    }
  };
  const std::int64_t na = JointActionCount(g.agent_action_sizes);
  const std::int64_t nb = JointActionCount(g.adversary_action_sizes);
  env->normalization_seed = options.normalization_seed;
  env->normalization_exhaustive = na <= options.exhaustive_limit / std::max<std::int64_t>(nb, 1);
  if (env->normalization_exhaustive) {
    for (std::int64_t a = 0; a < na; ++a) {
      const std::vector<int> agent = DecodeJointAction(g.agent_action_sizes, a);
      for (std::int64_t b = 0; b < nb; ++b) {
        fold({agent, DecodeJointAction(g.adversary_action_sizes, b)});
      }
    }
  } else {
    std::mt19937_64 rng(options.normalization_seed);
    for (int s = 0; s < options.normalization_samples; ++s) {
      ActionProfile p;
      for (int k : g.agent_action_sizes) p.agent.push_back(static_cast<int>(rng() % k));
      for (int k : g.adversary_action_sizes) {
        p.adversary.push_back(static_cast<int>(rng() % k));
      }
      fold(p);
    }
  }
  env->node_lo.resize(n);
  env->node_hi.resize(n);
  for (int i = 0; i < n; ++i) {
    double span = hi[i] - lo[i];
    if (!(span > 1e-12)) span = 1.0;
    env->node_lo[i] = lo[i] - 0.05 * span;
    env->node_hi[i] = hi[i] + 0.05 * span;
  }
}

}  // namespace

ActionMap ActionMap::Affine(int k, double lo, double hi) {
  return {Kind::kAffine, k, hi - lo, 0.5 * (hi + lo)};
}

ActionMap ActionMap::Penny(int k, double lo, double hi, PennyGrouping grouping) {
  ActionMap m = Affine(k, lo, hi);
  m.kind = k % 2 == 0 ? Kind::kPennyEven : Kind::kPennyOdd;
  m.grouping = grouping;
  return m;
}

double MapAction(const ActionMap& map, int discrete) {
  if (discrete < 0 || discrete >= map.k) {
    Fail(ErrorCode::kIndexOutOfRange, "action index " + std::to_string(discrete) +
                                          " outside [0, " + std::to_string(map.k) + ")");
  }
  if (map.k == 1) return map.c2;
  const double span = map.k - 1.0;
  const double eps = map.epsilon;
  double u = 0.0;
  switch (map.kind) {
    case ActionMap::Kind::kAffine:
      u = discrete / span;
      break;
    case ActionMap::Kind::kPennyEven:
    case ActionMap::Kind::kPennyOdd: {
      const double shift = map.kind == ActionMap::Kind::kPennyOdd ? 0.5 : 0.0;
      const double t = (discrete + shift) / span;
      u = map.grouping == PennyGrouping::kRestored ? t * (1.0 - 2.0 * eps) + eps
                                                   : t * (1.0 - 2.0 * eps) * eps;
      break;
    }
  }
  return (u - 0.5) * map.c1 + map.c2;
}

Status ValidateAdversaryPolicy(const AdversaryPolicy& policy) {
  if (!(policy.random_prob >= 0.0 && policy.random_prob <= 1.0)) {
    return {ErrorCode::kInvalidConfig, "random_prob must lie in [0, 1]"};
  }
  if (policy.response_samples < 1 || policy.exact_limit < 1) {
    return {ErrorCode::kInvalidConfig, "response sampling needs positive sizes"};
  }
  if (policy.fixed_action < 0) {
    return {ErrorCode::kInvalidConfig, "fixed adversary action must be >= 0"};
  }
  return Status::Ok();
}

const std::vector<std::string>& EnvNames() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, make] : Registry()) out.push_back(name);
    return out;
  }();
  return names;
}

EnvSpec MakeEnv(const std::string& name, const EnvOptions& options) {
  auto it = Registry().find(name);
  if (it == Registry().end()) {
    Fail(ErrorCode::kUnknownEnvironment, "unknown environment '" + name + "'");
  }
  if (options.agent_k < 2 || options.adversary_k < 2) {
    Fail(ErrorCode::kInvalidArgument, "environments need K >= 2 actions per variable");
  }
  if (!(options.noise_sd >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "noise_sd must be >= 0");
  }
  const Network net = it->second();
  EnvSpec env;
  env.name = name;

  CausalGraph g;
  g.node_count = static_cast<int>(net.nodes.size());
  for (const NodeDef& node : net.nodes) {
    g.parents.push_back(node.parents);
    g.agent_inputs.push_back(node.agent);
    g.adversary_inputs.push_back(node.adversary);
  }
  g.agent_action_sizes.assign(net.agent_vars, options.agent_k);
  g.adversary_action_sizes.assign(net.adversary_vars, options.adversary_k);
  FinalizeGraph(g);

  for (int v = 0; v < net.agent_vars; ++v) {
    env.agent_maps.push_back(ActionMap::Affine(options.agent_k, net.agent_lo, net.agent_hi));
  }
  for (int v = 0; v < net.adversary_vars; ++v) {
    env.adversary_maps.push_back(
        net.penny ? ActionMap::Penny(options.adversary_k, net.adversary_lo,
                                     net.adversary_hi, options.penny)
                  : ActionMap::Affine(options.adversary_k, net.adversary_lo,
                                      net.adversary_hi));
  }

  GroundTruthScm raw;
  raw.graph = g;
  raw.noise.assign(g.node_count, NoiseSpec::None());
  for (const NodeDef& node : net.nodes) {
    raw.mechanisms.push_back({node.fn, static_cast<int>(node.parents.size()),
                              static_cast<int>(node.agent.size()),
                              static_cast<int>(node.adversary.size())});
  }
  auto tables = [](const std::vector<ActionMap>& maps) {
    std::vector<std::vector<double>> out;
    for (const ActionMap& m : maps) {
      std::vector<double> values(m.k);
      for (int i = 0; i < m.k; ++i) values[i] = MapAction(m, i);
      out.push_back(std::move(values));
    }
    return out;
  };
  raw.agent_values = tables(env.agent_maps);
  raw.adversary_values = tables(env.adversary_maps);
  return NormalizeEnv(std::move(env), std::move(raw), options);
}

EnvSpec NormalizeEnv(EnvSpec env, GroundTruthScm raw, const EnvOptions& options) {
  const CausalGraph& g = raw.graph;
  ObserveRanges(raw, options, &env);

  GroundTruthScm scm = raw;
  for (int i = 0; i < g.node_count; ++i) {
    const double lo = env.node_lo[i], span = env.node_hi[i] - env.node_lo[i];
    std::vector<double> parent_lo, parent_span;
    for (int p : g.parents[i]) {
      parent_lo.push_back(env.node_lo[p]);
      parent_span.push_back(env.node_hi[p] - env.node_lo[p]);
    }
    if (parent_lo.size() > 8) Fail(ErrorCode::kInvalidArgument, "too many parents");
    MechanismFn inner = raw.mechanisms[i].fn;
    scm.mechanisms[i].fn = [inner, lo, span, parent_lo, parent_span](
                               std::span<const double> parents,
                               std::span<const double> agent,
                               std::span<const double> adversary) {
      double raw_parents[8];
      for (size_t j = 0; j < parents.size(); ++j) {
        raw_parents[j] = parent_lo[j] + parents[j] * parent_span[j];
      }
      return (inner(std::span<const double>(raw_parents, parents.size()), agent,
                    adversary) - lo) / span;
    };
    scm.noise[i] = options.noise_sd > 0.0 ? NoiseSpec::TruncatedGaussian(options.noise_sd)
                                          : NoiseSpec::None();
  }
  const Status st = ValidateScm(scm);
  if (!st.ok()) Fail(st.code, st.message);
  env.raw_scm = std::move(raw);
  env.scm = std::move(scm);
  return env;
}

EnvSpec MakeEnv(const std::string& name, int agent_k, int adversary_k) {
  EnvOptions options;
  options.agent_k = agent_k;
  options.adversary_k = adversary_k;
  return MakeEnv(name, options);
}

RewardTable BuildRewardTable(const GroundTruthScm& scm, int noise_samples,
                             std::uint64_t rng_seed, std::int64_t max_entries) {
  const CausalGraph& g = scm.graph;
  RewardTable table;
  table.agent_count = JointActionCount(g.agent_action_sizes);
  table.adversary_count = JointActionCount(g.adversary_action_sizes);
  if (table.agent_count > max_entries / std::max<std::int64_t>(table.adversary_count, 1)) {
    Fail(ErrorCode::kActionSpaceTooLarge, "reward table would exceed " +
                                              std::to_string(max_entries) + " entries");
  }
  table.values.resize(table.agent_count * table.adversary_count);
  std::vector<std::vector<int>> adversaries;
  for (std::int64_t b = 0; b < table.adversary_count; ++b) {
    adversaries.push_back(DecodeJointAction(g.adversary_action_sizes, b));
  }
  for (std::int64_t a = 0; a < table.agent_count; ++a) {
    ActionProfile p{DecodeJointAction(g.agent_action_sizes, a), {}};
    for (std::int64_t b = 0; b < table.adversary_count; ++b) {
      p.adversary = adversaries[b];
      table.values[a * table.adversary_count + b] =
          ExpectedReward(scm, p, noise_samples, rng_seed);
    }
  }
  return table;
}

std::vector<int> AdversaryAct(const AdversaryPolicy& policy,
                              const CausalGraph& graph,
                              const RewardTable& table,
                              std::span<const double> agent_weights,
                              std::uint64_t rng_seed) {
  const Status st = ValidateAdversaryPolicy(policy);
  if (!st.ok()) Fail(st.code, st.message);
  const std::int64_t nb = table.adversary_count;
  std::mt19937_64 rng(rng_seed);
  auto decode = [&](std::int64_t b) {
    return DecodeJointAction(graph.adversary_action_sizes, b);
  };
  switch (policy.mode) {
    case AdversaryPolicy::Mode::kFixed:
      return decode(std::min(policy.fixed_action, nb - 1));
    case AdversaryPolicy::Mode::kUniformRandom:
      return decode(static_cast<std::int64_t>(rng() % nb));
    case AdversaryPolicy::Mode::kMixedBestResponse:
      break;
  }
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < policy.random_prob) {
    return decode(static_cast<std::int64_t>(rng() % nb));
  }
  if (static_cast<std::int64_t>(agent_weights.size()) != table.agent_count) {
    Fail(ErrorCode::kDimensionMismatch, "agent weights do not match the reward table");
  }
  std::vector<double> expected(nb, 0.0);
  if (table.agent_count <= policy.exact_limit) {
    for (std::int64_t a = 0; a < table.agent_count; ++a) {
      if (agent_weights[a] == 0.0) continue;
      for (std::int64_t b = 0; b < nb; ++b) expected[b] += agent_weights[a] * table.at(a, b);
    }
  } else {
    for (int s = 0; s < policy.response_samples; ++s) {
      const std::int64_t a = SampleIndex(agent_weights, rng);
      for (std::int64_t b = 0; b < nb; ++b) expected[b] += table.at(a, b);
    }
  }
  std::int64_t best = 0;
  for (std::int64_t b = 1; b < nb; ++b) {
    if (expected[b] < expected[best]) best = b;
  }
  return decode(best);
}

}  // namespace acbo
