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

#include "acbo/dcbo.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace acbo {
namespace {

std::vector<int> GroupSizes(const std::vector<int>& sizes,
                            const std::vector<int>& group) {
  std::vector<int> out;
  for (int v : group) out.push_back(sizes[v]);
  return out;
}

}  // namespace

AgentBank::AgentBank(const CausalGraph& graph, LearningRateMode mode,
                     int horizon)
    : AgentBank(graph, {}, mode, horizon) {}

AgentBank::AgentBank(const CausalGraph& graph,
                     std::vector<std::vector<int>> groups,
                     LearningRateMode mode, int horizon)
    : sizes_(graph.agent_action_sizes), groups_(std::move(groups)) {
  if (groups_.empty()) {
    for (int v = 0; v < num_agent_vars(); ++v) {
      if (sizes_[v] > 1) groups_.push_back({v});
    }
  }
  std::vector<int> owner(sizes_.size(), -1);
  for (size_t a = 0; a < groups_.size(); ++a) {
    if (groups_[a].empty()) Fail(ErrorCode::kInvalidConfig, "empty agent group");
    for (int v : groups_[a]) {
      if (v < 0 || v >= num_agent_vars() || owner[v] != -1) {
        Fail(ErrorCode::kInvalidConfig,
             "agent variable " + std::to_string(v) + " unknown or owned twice");
      }
      owner[v] = static_cast<int>(a);
    }
  }
  for (int v = 0; v < num_agent_vars(); ++v) {
    if (owner[v] == -1 && sizes_[v] > 1) {
      Fail(ErrorCode::kInvalidConfig,
           "agent variable " + std::to_string(v) + " has no owner");
    }
  }
  for (const auto& g : groups_) {
    const std::int64_t k = JointActionCount(GroupSizes(sizes_, g));
    if (k > (1 << 24)) Fail(ErrorCode::kActionSpaceTooLarge, "agent too large");
    learners_.emplace_back(static_cast<int>(k), mode, horizon);
  }
}

std::vector<int> AgentBank::Sample(std::uint64_t rng_seed) const {
  std::vector<int> joint(sizes_.size(), 0);
  std::mt19937_64 rng(rng_seed);
  for (int a = 0; a < agent_count(); ++a) {
    const std::vector<double> w = learners_[a].state().Weights();
    const int local = SampleIndex(w, rng);
    const std::vector<int> parts =
        DecodeJointAction(GroupSizes(sizes_, groups_[a]), local);
    for (size_t j = 0; j < parts.size(); ++j) joint[groups_[a][j]] = parts[j];
  }
  return joint;
}

std::vector<std::vector<double>> AgentBank::Update(
    const ActionScorer& scorer, std::span<const int> joint_action,
    std::span<const int> observed_adversary, ClipMode clip) {
  if (static_cast<int>(joint_action.size()) != num_agent_vars()) {
    Fail(ErrorCode::kDimensionMismatch, "joint action has wrong length");
  }
  const std::vector<int> realized(joint_action.begin(), joint_action.end());
  const std::vector<int> adversary(observed_adversary.begin(),
                                   observed_adversary.end());
  // One batch for all agents: sum_i K_i profiles.
  std::vector<ActionProfile> profiles;
  std::vector<size_t> offsets = {0};
  for (int a = 0; a < agent_count(); ++a) {
    const std::vector<int> gs = GroupSizes(sizes_, groups_[a]);
    const int k = learners_[a].state().size();
    for (int local = 0; local < k; ++local) {
      ActionProfile p{realized, adversary};
      const std::vector<int> parts = DecodeJointAction(gs, local);
      for (size_t j = 0; j < parts.size(); ++j) p.agent[groups_[a][j]] = parts[j];
      profiles.push_back(std::move(p));
    }
    offsets.push_back(profiles.size());
  }
  const std::vector<double> ucb = scorer(profiles);
  std::vector<std::vector<double>> out;
  for (int a = 0; a < agent_count(); ++a) {
    std::vector<double> mine(ucb.begin() + offsets[a], ucb.begin() + offsets[a + 1]);
    learners_[a].Update(ClipRewards(mine, clip), clip != ClipMode::kNone);
    out.push_back(std::move(mine));
  }
  return out;
}

SubmodularityReport CheckDrSubmodular(const RewardFn& reward,
                                      const std::vector<std::vector<double>>& grid,
                                      double tolerance, std::int64_t max_checks) {
  const int dims = static_cast<int>(grid.size());
  if (dims == 0) Fail(ErrorCode::kInvalidArgument, "grid has no dimensions");
  double pairs = 1.0, steps = 0.0;
  for (const auto& g : grid) {
    if (g.empty()) Fail(ErrorCode::kInvalidArgument, "empty grid dimension");
    for (size_t j = 1; j < g.size(); ++j) {
      if (!(g[j] > g[j - 1])) {
        Fail(ErrorCode::kInvalidArgument, "grid values must increase");
      }
    }
    const double n = static_cast<double>(g.size());
    pairs *= n * (n + 1) / 2;
    steps += n - 1;
  }
  if (pairs * (1.0 + steps) > static_cast<double>(max_checks)) {
    Fail(ErrorCode::kGridTooLarge, "grid needs ~" +
                                       std::to_string(pairs * (1.0 + steps)) +
                                       " checks");
  }

  // shift[d][from][to]: index reached from `to` by the increment that takes
  // index `from` to `from + s`, flattened as shift[d][(from * n + to) * n + s].
  std::vector<std::vector<int>> shift(dims);
  for (int d = 0; d < dims; ++d) {
    const auto& g = grid[d];
    const int n = static_cast<int>(g.size());
    const double scale = std::max(1.0, std::abs(g.back() - g.front()));
    shift[d].assign(static_cast<size_t>(n) * n * n, -1);
    for (int from = 0; from < n; ++from) {
      for (int s = 1; from + s < n; ++s) {
        const double k = g[from + s] - g[from];
        for (int to = 0; to < n; ++to) {
          for (int j = to; j < n; ++j) {
            if (std::abs(g[j] - g[to] - k) <= 1e-9 * scale) {
              shift[d][(static_cast<size_t>(from) * n + to) * n + s] = j;
              break;
            }
          }
        }
      }
    }
  }

  std::vector<int> radix;
  for (const auto& g : grid) radix.push_back(static_cast<int>(g.size()));
  const std::int64_t points = JointActionCount(radix);
  std::vector<double> f(points);
  std::vector<double> x(dims);
  for (std::int64_t p = 0; p < points; ++p) {
    const std::vector<int> idx = DecodeJointAction(radix, p);
    for (int d = 0; d < dims; ++d) x[d] = grid[d][idx[d]];
    f[p] = reward(x);
    if (!std::isfinite(f[p])) {
      Fail(ErrorCode::kNonFiniteObjective, "reward is not finite on the grid");
    }
  }

  SubmodularityReport report;
  std::vector<int> yi(dims);
  for (std::int64_t px = 0; px < points; ++px) {
    const std::vector<int> xi = DecodeJointAction(radix, px);
    // Enumerate y >= x as an odometer over [xi_d, n_d).
    yi = xi;
    while (true) {
      const std::int64_t py = EncodeJointAction(radix, yi);
      ++report.pairs_checked;
      const double mono_gap = f[px] - f[py];
      if (mono_gap > tolerance) {
        ++report.monotonicity_violations;
        report.worst_monotonicity_gap = std::max(report.worst_monotonicity_gap, mono_gap);
      }
      for (int d = 0; d < dims; ++d) {
        const int n = radix[d];
        for (int s = 1; xi[d] + s < n; ++s) {
          const int yj = shift[d][(static_cast<size_t>(xi[d]) * n + yi[d]) * n + s];
          if (yj < 0) continue;
          std::vector<int> xs = xi, ys = yi;
          xs[d] += s;
          ys[d] = yj;
          const double gain_x = f[EncodeJointAction(radix, xs)] - f[px];
          const double gain_y = f[EncodeJointAction(radix, ys)] - f[py];
          const double gap = gain_y - gain_x;
          if (gap > tolerance) {
            ++report.dr_violations;
            report.worst_dr_gap = std::max(report.worst_dr_gap, gap);
          }
        }
      }
      int d = dims - 1;
      while (d >= 0 && ++yi[d] == radix[d]) {
        yi[d] = xi[d];
        --d;
      }
      if (d < 0) break;
    }
  }
  return report;
}

Curvature CurvatureEstimate(const GameRewardFn& reward, int num_agent_coords,
                            const std::vector<std::vector<double>>& adversary_sequence,
                            double a_max, double step) {
  if (num_agent_coords < 1 || adversary_sequence.empty() || !(step > 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "curvature needs coordinates, rounds, h > 0");
  }
  const int m = num_agent_coords;
  auto gradient = [&](double base, const std::vector<double>& adv) {
    std::vector<double> g(m), a(m, base);
    for (int i = 0; i < m; ++i) {
      a[i] = base + step;
      const double up = reward(a, adv);
      a[i] = base - step;
      const double down = reward(a, adv);
      a[i] = base;
      g[i] = (up - down) / (2.0 * step);
    }
    return g;
  };
  std::vector<double> sum0(m, 0.0), sum2(m, 0.0);
  double worst_ratio = INFINITY;
  for (const auto& adv : adversary_sequence) {
    const std::vector<double> g0 = gradient(0.0, adv);
    const std::vector<double> g2 = gradient(2.0 * a_max, adv);
    for (int i = 0; i < m; ++i) {
      if (std::abs(g0[i]) < 1e-12) {
        Fail(ErrorCode::kZeroBaseGradient,
             "gradient at 0 vanishes in coordinate " + std::to_string(i));
      }
      sum0[i] += g0[i];
      sum2[i] += g2[i];
      worst_ratio = std::min(worst_ratio, g2[i] / g0[i]);
    }
  }
  double avg_ratio = INFINITY;
  for (int i = 0; i < m; ++i) {
    if (std::abs(sum0[i]) < 1e-12) {
      Fail(ErrorCode::kZeroBaseGradient,
           "summed gradient at 0 vanishes in coordinate " + std::to_string(i));
    }
    avg_ratio = std::min(avg_ratio, sum2[i] / sum0[i]);
  }
  return {std::clamp(1.0 - avg_ratio, 0.0, 1.0),
          std::clamp(1.0 - worst_ratio, 0.0, 1.0)};
}

}  // namespace acbo
