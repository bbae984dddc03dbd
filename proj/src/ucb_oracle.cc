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

#include "acbo/ucb_oracle.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace acbo {
namespace {

thread_local std::int64_t ucb_calls = 0;

constexpr double kKnownStep = 1e-6;
constexpr std::size_t kMaxBruteforceChunk = 8192;

std::uint64_t SplitMix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t HashProfile(const ActionProfile& p) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  for (int a : p.agent) mix(static_cast<std::uint64_t>(a) + 1);
  mix(0xffffULL);
  for (int a : p.adversary) mix(static_cast<std::uint64_t>(a) + 1);
  return h;
}

// ---------------------------------------------------------------------------
// Feedforward eta: tanh(w3 . tanh(W2 tanh(W1 x + b1) + b2) + b3).

struct MlpLayout {
  int d, w;
  int W1() const { return 0; }
  int b1() const { return w * d; }
  int W2() const { return b1() + w; }
  int b2() const { return W2() + w * w; }
  int w3() const { return b2() + w; }
  int b3() const { return w3() + w; }
  int size() const { return b3() + 1; }
};

double MlpForward(const double* p, const MlpLayout& L, const double* x,
                  double* h1, double* h2) {
  for (int u = 0; u < L.w; ++u) {
    double z = p[L.b1() + u];
    for (int k = 0; k < L.d; ++k) z += p[L.W1() + k * L.w + u] * x[k];
    h1[u] = std::tanh(z);
  }
  for (int u = 0; u < L.w; ++u) {
    double z = p[L.b2() + u];
    for (int k = 0; k < L.w; ++k) z += p[L.W2() + k * L.w + u] * h1[k];
    h2[u] = std::tanh(z);
  }
  double z = p[L.b3()];
  for (int u = 0; u < L.w; ++u) z += p[L.w3() + u] * h2[u];
  return std::tanh(z);
}

// Accumulates gout * d out / d params into gp and gout * d out / d x into gx.
void MlpBackward(const double* p, const MlpLayout& L, const double* x,
                 const double* h1, const double* h2, double out, double gout,
                 double* gp, double* gx, std::vector<double>& scratch) {
  scratch.assign(2 * L.w, 0.0);
  double* dz2 = scratch.data();
  double* dz1 = scratch.data() + L.w;
  double dz3 = gout * (1.0 - out * out);
  gp[L.b3()] += dz3;
  for (int u = 0; u < L.w; ++u) {
    gp[L.w3() + u] += dz3 * h2[u];
    dz2[u] = dz3 * p[L.w3() + u] * (1.0 - h2[u] * h2[u]);
  }
  for (int k = 0; k < L.w; ++k) {
    double dh1 = 0.0;
    for (int u = 0; u < L.w; ++u) {
      gp[L.W2() + k * L.w + u] += dz2[u] * h1[k];
      dh1 += p[L.W2() + k * L.w + u] * dz2[u];
    }
    dz1[k] = dh1 * (1.0 - h1[k] * h1[k]);
  }
  for (int u = 0; u < L.w; ++u) gp[L.b2() + u] += dz2[u];
  for (int u = 0; u < L.w; ++u) gp[L.b1() + u] += dz1[u];
  for (int k = 0; k < L.d; ++k) {
    double acc = 0.0;
    for (int u = 0; u < L.w; ++u) {
      gp[L.W1() + k * L.w + u] += dz1[u] * x[k];
      acc += p[L.W1() + k * L.w + u] * dz1[u];
    }
    if (gx) gx[k] += acc;
  }
}

// ---------------------------------------------------------------------------
// A batch of eta functions: column g of params[i] holds node i's parameters
// for group g. Pinned nodes are fixed at eta = +1 and receive no gradient.

struct EtaBank {
  EtaFunction::Kind kind = EtaFunction::Kind::kConstant;
  int width = 16;
  std::vector<int> input_dims;
  std::vector<Eigen::MatrixXd> params;
  std::vector<char> pinned;

  int groups() const { return params.empty() ? 0 : static_cast<int>(params[0].cols()); }

  static EtaBank Like(const EtaBank& other) {
    EtaBank b = other;
    for (auto& m : b.params) m.setZero();
    return b;
  }
};

EtaBank ConstantBank(const CausalGraph& g, int groups, double value) {
  EtaBank b;
  b.kind = EtaFunction::Kind::kConstant;
  b.pinned.assign(g.node_count, 0);
  for (int i = 0; i < g.node_count; ++i) {
    b.input_dims.push_back(NodeInputDim(g, i));
    b.params.push_back(Eigen::MatrixXd::Constant(1, groups, value));
  }
  return b;
}

EtaBank BankFromFunction(const CausalGraph& g, const EtaFunction& eta) {
  EtaBank b;
  b.kind = eta.kind;
  b.width = eta.width;
  b.pinned.assign(g.node_count, 0);
  for (int i = 0; i < g.node_count; ++i) {
    int d = NodeInputDim(g, i);
    b.input_dims.push_back(d);
    int count = EtaFunction::ParamCount(eta.kind, d, eta.width);
    if (static_cast<int>(eta.params[i].size()) != count) {
      Fail(ErrorCode::kDimensionMismatch,
           "eta parameters of node " + std::to_string(i) + " have size " +
               std::to_string(eta.params[i].size()) + ", expected " +
               std::to_string(count));
    }
    b.params.push_back(
        Eigen::Map<const Eigen::VectorXd>(eta.params[i].data(), count));
  }
  return b;
}

void FillRandom(EtaBank& bank, int group, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (size_t i = 0; i < bank.params.size(); ++i) {
    auto col = bank.params[i].col(group);
    if (bank.kind == EtaFunction::Kind::kConstant) {
      col[0] = unit(rng);
      continue;
    }
    MlpLayout L{bank.input_dims[i], bank.width};
    std::normal_distribution<double> n1(0.0, 1.0 / std::sqrt(std::max(L.d, 1)));
    std::normal_distribution<double> n2(0.0, 1.0 / std::sqrt(L.w));
    for (int k = 0; k < L.w * L.d; ++k) col[L.W1() + k] = n1(rng);
    for (int k = 0; k < L.w; ++k) col[L.b1() + k] = unit(rng);
    for (int k = 0; k < L.w * L.w; ++k) col[L.W2() + k] = n2(rng);
    for (int k = 0; k < L.w; ++k) col[L.b2() + k] = 0.5 * unit(rng);
    for (int k = 0; k < L.w; ++k) col[L.w3() + k] = n2(rng);
    col[L.b3()] = unit(rng);
  }
}

// ---------------------------------------------------------------------------
// Lockstep evaluation of many (profile, eta) groups. Lane l = g * S + s
// evaluates group g under noise row s.

class Engine {
 public:
  Engine(const ConfidenceModel& model, const std::vector<ActionProfile>& profiles,
         const Eigen::MatrixXd& noise)
      : m_(model), g_(model.graph), noise_(noise) {
    if (noise.cols() != g_.node_count || noise.rows() < 1) {
      Fail(ErrorCode::kDimensionMismatch, "noise matrix must be S x nodes");
    }
    for (const auto& p : profiles) {
      Status s = ValidateProfile(g_, p);
      if (!s.ok()) Fail(s.code, s.message);
      embedded_.push_back(Embed(g_, p));
    }
    const int n = g_.node_count;
    inverse_.resize(n);
    roots_.resize(n);
    for (int i = 0; i < n; ++i) {
      const NodeModel& nm = m_.nodes[i];
      if (nm.gp && nm.gp->distinct_size() > 0 && !g_.parents[i].empty()) {
        inverse_[i] = nm.gp->InverseGram();
      }
      if (!g_.parents[i].empty()) continue;
      // Root inputs depend on the profile only; predict once per call.
      RootCache& rc = roots_[i];
      const int d = NodeInputDim(g_, i);
      const int p = static_cast<int>(embedded_.size());
      rc.q.resize(d, p);
      std::vector<double> empty;
      for (int c = 0; c < p; ++c) {
        AssembleNodeInput(g_, i, empty, embedded_[c],
                          std::span<double>(rc.q.col(c).data(), d));
      }
      if (nm.gp) {
        GpPosterior::Batch b;
        nm.gp->Predict(rc.q, false, &b);
        rc.mean = b.mean;
        rc.sd = b.sd;
      } else {
        rc.mean.resize(p);
        rc.sd.setZero(p);
        for (int c = 0; c < p; ++c) {
          rc.mean[c] = nm.known(std::span<const double>(rc.q.col(c).data(), d));
        }
      }
    }
  }

  int samples() const { return static_cast<int>(noise_.rows()); }

  // values[g] = mean reward of group g; grads (if non-null) receives
  // d values[g] / d bank params, column by column.
  void Run(const std::vector<int>& group_profile, const EtaBank& bank,
           std::vector<double>* values, EtaBank* grads) {
    const int n = g_.node_count;
    const int S = samples();
    const int G = static_cast<int>(group_profile.size());
    const int L = G * S;
    const bool ff = bank.kind == EtaFunction::Kind::kFeedforward;
    const bool want_grad = grads != nullptr;
    x_.resize(n, L);
    nodes_.resize(n);

    for (int i : g_.topo_order) {
      NodeState& ns = nodes_[i];
      const NodeModel& nm = m_.nodes[i];
      const int d = NodeInputDim(g_, i);
      const bool root = g_.parents[i].empty();
      ns.eta.resize(L);
      if (root) {
        if (ff) {
          ns.q.resize(d, L);
          for (int l = 0; l < L; ++l) {
            ns.q.col(l) = roots_[i].q.col(group_profile[l / S]);
          }
        }
      } else {
        ns.q.resize(d, L);
        const int np = static_cast<int>(g_.parents[i].size());
        for (int l = 0; l < L; ++l) {
          for (int k = 0; k < np; ++k) ns.q(k, l) = x_(g_.parents[i][k], l);
          const EmbeddedProfile& e = embedded_[group_profile[l / S]];
          int k = np;
          for (int v : g_.agent_inputs[i]) ns.q(k++, l) = e.agent[v];
          for (int v : g_.adversary_inputs[i]) ns.q(k++, l) = e.adversary[v];
        }
        if (nm.gp) {
          if (nm.gp->distinct_size() > 0) {
            nm.gp->PredictWithInverse(inverse_[i], ns.q, want_grad, &ns.pred);
          } else {
            nm.gp->Predict(ns.q, want_grad, &ns.pred);
          }
        } else {
          KnownForward(i, ns, want_grad);
        }
      }

      // eta and node values.
      if (ff && nm.gp && !bank.pinned[i]) {
        ns.h1.resize(bank.width, L);
        ns.h2.resize(bank.width, L);
      }
      MlpLayout layout{d, bank.width};
      for (int l = 0; l < L; ++l) {
        const int g = l / S;
        double mean, sd;
        if (root) {
          mean = roots_[i].mean[group_profile[g]];
          sd = roots_[i].sd[group_profile[g]];
        } else {
          mean = ns.pred.mean[l];
          sd = nm.gp ? ns.pred.sd[l] : 0.0;
        }
        double eta = 0.0;
        if (nm.gp) {
          if (bank.pinned[i]) {
            eta = 1.0;
          } else if (!ff) {
            eta = bank.params[i](0, g);
          } else {
            eta = MlpForward(bank.params[i].col(g).data(), layout,
                             ns.q.col(l).data(), ns.h1.col(l).data(),
                             ns.h2.col(l).data());
          }
        }
        ns.eta[l] = eta;
        x_(i, l) = mean + m_.beta * sd * eta + noise_(l % S, i);
      }
    }

    const int m = g_.reward_node();
    values->assign(G, 0.0);
    for (int l = 0; l < L; ++l) (*values)[l / S] += x_(m, l) / S;
    for (double v : *values) {
      if (!std::isfinite(v)) {
        Fail(ErrorCode::kNonFiniteObjective, "propagated reward is not finite");
      }
    }
    if (!want_grad) return;

    *grads = EtaBank::Like(bank);
    adj_.setZero(n, L);
    adj_.row(m).setConstant(1.0 / S);
    std::vector<double> dx, scratch;
    for (auto it = g_.topo_order.rbegin(); it != g_.topo_order.rend(); ++it) {
      const int i = *it;
      const NodeState& ns = nodes_[i];
      const NodeModel& nm = m_.nodes[i];
      const bool root = g_.parents[i].empty();
      const int d = NodeInputDim(g_, i);
      const int np = static_cast<int>(g_.parents[i].size());
      MlpLayout layout{d, bank.width};
      for (int l = 0; l < L; ++l) {
        const double a = adj_(i, l);
        if (a == 0.0) continue;
        const int g = l / S;
        dx.assign(d, 0.0);
        if (nm.gp) {
          const double sd =
              root ? roots_[i].sd[group_profile[g]] : ns.pred.sd[l];
          if (!bank.pinned[i]) {
            if (!ff) {
              grads->params[i](0, g) += a * m_.beta * sd;
            } else {
              MlpBackward(bank.params[i].col(g).data(), layout,
                          ns.q.col(l).data(), ns.h1.col(l).data(),
                          ns.h2.col(l).data(), ns.eta[l], a * m_.beta * sd,
                          grads->params[i].col(g).data(),
                          root ? nullptr : dx.data(), scratch);
            }
          }
          for (int k = 0; k < np; ++k) {
            double deriv = ns.pred.dmean(k, l) +
                           m_.beta * ns.eta[l] * ns.pred.dsd(k, l);
            adj_(g_.parents[i][k], l) += a * deriv + dx[k];
          }
        } else {
          for (int k = 0; k < np; ++k) {
            adj_(g_.parents[i][k], l) += a * ns.known_grad(k, l);
          }
        }
      }
    }
  }

 private:
  struct RootCache {
    Eigen::MatrixXd q;
    Eigen::VectorXd mean, sd;
  };
  struct NodeState {
    Eigen::MatrixXd q;
    GpPosterior::Batch pred;
    Eigen::MatrixXd known_grad;
    std::vector<double> eta;
    Eigen::MatrixXd h1, h2;
  };

  void KnownForward(int i, NodeState& ns, bool want_grad) {
    const int d = static_cast<int>(ns.q.rows());
    const int L = static_cast<int>(ns.q.cols());
    const int np = static_cast<int>(g_.parents[i].size());
    const KnownMechanism& f = m_.nodes[i].known;
    ns.pred.mean.resize(L);
    ns.pred.sd.setZero(L);
    if (want_grad) ns.known_grad.resize(np, L);
    std::vector<double> buf(d);
    for (int l = 0; l < L; ++l) {
      std::copy(ns.q.col(l).data(), ns.q.col(l).data() + d, buf.begin());
      ns.pred.mean[l] = f(buf);
      if (!want_grad) continue;
      for (int k = 0; k < np; ++k) {
        double h = kKnownStep * std::max(1.0, std::abs(buf[k]));
        double x0 = buf[k];
        buf[k] = x0 + h;
        double fp = f(buf);
        buf[k] = x0 - h;
        double fm = f(buf);
        buf[k] = x0;
        ns.known_grad(k, l) = (fp - fm) / (2.0 * h);
      }
    }
  }

  const ConfidenceModel& m_;
  const CausalGraph& g_;
  const Eigen::MatrixXd& noise_;
  std::vector<EmbeddedProfile> embedded_;
  std::vector<Eigen::MatrixXd> inverse_;
  std::vector<RootCache> roots_;
  std::vector<NodeState> nodes_;
  Eigen::MatrixXd x_, adj_;
};

void CheckModel(const ConfidenceModel& model) {
  Status s = ValidateConfidence(model);
  if (!s.ok()) Fail(s.code, s.message);
}

int EffectiveSamples(const ConfidenceModel& model, int requested) {
  for (const NoiseSpec& n : model.noise) {
    if (!n.is_none()) return requested;
  }
  return 1;
}

// Adam ascent on every group at once, keeping the best value seen per group.
void Ascend(Engine& engine, const std::vector<int>& group_profile,
            EtaBank& bank, const OracleSettings& st, std::vector<double>& best) {
  const bool constant = bank.kind == EtaFunction::Kind::kConstant;
  EtaBank m1 = EtaBank::Like(bank), m2 = EtaBank::Like(bank), grad;
  std::vector<double> values;
  const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
  double lr = st.step_size;
  for (int step = 0; step <= st.max_ascent_steps; ++step) {
    const bool last = step == st.max_ascent_steps;
    engine.Run(group_profile, bank, &values, last ? nullptr : &grad);
    for (size_t g = 0; g < values.size(); ++g) {
      best[g] = std::max(best[g], values[g]);
    }
    if (last) break;
    const double c1 = 1.0 - std::pow(b1, step + 1);
    const double c2 = 1.0 - std::pow(b2, step + 1);
    for (size_t i = 0; i < bank.params.size(); ++i) {
      if (bank.pinned[i]) continue;
      auto& p = bank.params[i];
      auto& gr = grad.params[i];
      m1.params[i] = b1 * m1.params[i] + (1.0 - b1) * gr;
      m2.params[i] = b2 * m2.params[i] + (1.0 - b2) * gr.cwiseAbs2();
      p.array() += lr * (m1.params[i].array() / c1) /
                   ((m2.params[i].array() / c2).sqrt() + eps);
      if (constant) p = p.cwiseMax(-1.0).cwiseMin(1.0);
    }
    lr *= st.step_decay;
  }
}

}  // namespace

EtaFunction EtaFunction::Constant(const CausalGraph& graph, double value) {
  EtaFunction e;
  e.kind = Kind::kConstant;
  for (int i = 0; i < graph.node_count; ++i) {
    e.input_dims.push_back(NodeInputDim(graph, i));
    e.params.push_back({std::clamp(value, -1.0, 1.0)});
  }
  return e;
}

EtaFunction EtaFunction::RandomConstant(const CausalGraph& graph,
                                        std::mt19937_64& rng) {
  EtaFunction e = Constant(graph, 0.0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto& p : e.params) p[0] = u(rng);
  return e;
}

EtaFunction EtaFunction::RandomFeedforward(const CausalGraph& graph, int width,
                                           std::mt19937_64& rng) {
  EtaBank bank;
  bank.kind = Kind::kFeedforward;
  bank.width = width;
  for (int i = 0; i < graph.node_count; ++i) {
    int d = NodeInputDim(graph, i);
    bank.input_dims.push_back(d);
    bank.params.push_back(Eigen::MatrixXd::Zero(ParamCount(bank.kind, d, width), 1));
  }
  bank.pinned.assign(graph.node_count, 0);
  FillRandom(bank, 0, rng);
  EtaFunction e;
  e.kind = Kind::kFeedforward;
  e.width = width;
  e.input_dims = bank.input_dims;
  for (auto& p : bank.params) e.params.emplace_back(p.data(), p.data() + p.size());
  return e;
}

int EtaFunction::ParamCount(Kind kind, int input_dim, int width) {
  if (kind == Kind::kConstant) return 1;
  return MlpLayout{input_dim, width}.size();
}

double EtaFunction::Evaluate(int node, std::span<const double> input) const {
  if (kind == Kind::kConstant) return std::clamp(params[node][0], -1.0, 1.0);
  MlpLayout L{input_dims[node], width};
  std::vector<double> h1(width), h2(width);
  return MlpForward(params[node].data(), L, input.data(), h1.data(), h2.data());
}

Status ValidateOracleSettings(const OracleSettings& s) {
  if (s.noise_samples < 1) {
    return {ErrorCode::kInvalidArgument, "noise_samples must be >= 1"};
  }
  if (s.restarts < 1) return {ErrorCode::kInvalidArgument, "restarts must be >= 1"};
  if (s.max_ascent_steps < 0) {
    return {ErrorCode::kInvalidArgument, "max_ascent_steps must be >= 0"};
  }
  if (!(s.step_size > 0.0) || !(s.step_decay > 0.0) || s.step_decay > 1.0) {
    return {ErrorCode::kInvalidArgument, "step size/decay out of range"};
  }
  if (s.width < 1) return {ErrorCode::kInvalidArgument, "width must be >= 1"};
  return Status::Ok();
}

Eigen::MatrixXd DrawNoise(const ConfidenceModel& model, int samples,
                          std::uint64_t seed) {
  const int n = model.graph.node_count;
  Eigen::MatrixXd noise = Eigen::MatrixXd::Zero(samples, n);
  if (model.noise.empty()) return noise;
  std::mt19937_64 rng(SplitMix(seed ^ 0x6e6f697365ULL));
  for (int s = 0; s < samples; ++s) {
    for (int i : model.graph.topo_order) noise(s, i) = model.noise[i].Sample(rng);
  }
  return noise;
}

double Propagate(const ConfidenceModel& model, const EtaFunction& eta,
                 const ActionProfile& profile, const Eigen::MatrixXd& noise) {
  CheckModel(model);
  Engine engine(model, {profile}, noise);
  std::vector<double> values;
  engine.Run({0}, BankFromFunction(model.graph, eta), &values, nullptr);
  return values[0];
}

double PropagateWithGradient(const ConfidenceModel& model,
                             const EtaFunction& eta,
                             const ActionProfile& profile,
                             const Eigen::MatrixXd& noise,
                             std::vector<std::vector<double>>* gradient) {
  CheckModel(model);
  Engine engine(model, {profile}, noise);
  EtaBank bank = BankFromFunction(model.graph, eta), grad;
  std::vector<double> values;
  engine.Run({0}, bank, &values, &grad);
  gradient->clear();
  for (auto& p : grad.params) gradient->emplace_back(p.data(), p.data() + p.size());
  return values[0];
}

double Ucb(const ConfidenceModel& model, const ActionProfile& profile,
           const OracleSettings& settings) {
  return UcbBatch(model, {profile}, settings)[0];
}

std::vector<double> UcbBatch(const ConfidenceModel& model,
                             const std::vector<ActionProfile>& profiles,
                             const OracleSettings& settings) {
  CheckModel(model);
  Status s = ValidateOracleSettings(settings);
  if (!s.ok()) Fail(s.code, s.message);
  const int P = static_cast<int>(profiles.size());
  RecordUcbCalls(P);
  if (P == 0) return {};
  const int S = EffectiveSamples(model, settings.noise_samples);
  Eigen::MatrixXd noise = DrawNoise(model, S, settings.seed);
  Engine engine(model, profiles, noise);
  const CausalGraph& g = model.graph;

  std::vector<int> identity(P);
  for (int p = 0; p < P; ++p) identity[p] = p;
  std::vector<double> best(P, -std::numeric_limits<double>::infinity());
  std::vector<double> values;

  if (model.eta_one_shortcut) {
    engine.Run(identity, ConstantBank(g, P, 1.0), &values, nullptr);
    return values;
  }
  for (double c : {0.0, 1.0, -1.0}) {
    engine.Run(identity, ConstantBank(g, P, c), &values, nullptr);
    for (int p = 0; p < P; ++p) best[p] = std::max(best[p], values[p]);
  }

  // Each restart starts from its own seeded random eta. The reward node's
  // eta is pinned at +1: it feeds nothing, and sigma >= 0 makes +1 optimal.
  // Without observation noise every node is evaluated at a single point, so
  // the constant family already spans every eta function.
  const int R = settings.restarts;
  EtaFunction::Kind kind = S == 1 && EffectiveSamples(model, 2) == 1
                               ? EtaFunction::Kind::kConstant
                               : settings.eta_kind;
  EtaBank bank;
  bank.kind = kind;
  bank.width = settings.width;
  bank.pinned.assign(g.node_count, 0);
  bank.pinned[g.reward_node()] = 1;
  for (int i = 0; i < g.node_count; ++i) {
    int d = NodeInputDim(g, i);
    bank.input_dims.push_back(d);
    bank.params.push_back(Eigen::MatrixXd::Zero(
        EtaFunction::ParamCount(kind, d, settings.width), P * R));
  }
  std::vector<int> group_profile(P * R);
  for (int p = 0; p < P; ++p) {
    const std::uint64_t h = HashProfile(profiles[p]);
    for (int r = 0; r < R; ++r) {
      group_profile[p * R + r] = p;
      std::mt19937_64 rng(SplitMix(settings.seed ^ SplitMix(h + r)));
      FillRandom(bank, p * R + r, rng);
    }
  }
  bool any_free = false;
  for (int i = 0; i < g.node_count; ++i) {
    any_free |= !bank.pinned[i] && !model.nodes[i].is_known();
  }
  std::vector<double> group_best(P * R, -std::numeric_limits<double>::infinity());
  if (any_free) {
    Ascend(engine, group_profile, bank, settings, group_best);
  } else {
    engine.Run(group_profile, bank, &group_best, nullptr);
  }
  for (int k = 0; k < P * R; ++k) {
    best[group_profile[k]] = std::max(best[group_profile[k]], group_best[k]);
  }
  return best;
}

double UcbBruteforce(const ConfidenceModel& model, const ActionProfile& profile,
                     int grid_resolution, const Eigen::MatrixXd& noise) {
  CheckModel(model);
  const int n = model.graph.node_count;
  if (n > 6) Fail(ErrorCode::kGraphTooLarge, "brute force supports <= 6 nodes");
  if (grid_resolution < 2 || grid_resolution > 21) {
    Fail(ErrorCode::kGraphTooLarge, "grid_resolution must lie in [2, 21]");
  }
  std::vector<double> grid(grid_resolution);
  for (int k = 0; k < grid_resolution; ++k) {
    grid[k] = -1.0 + 2.0 * k / (grid_resolution - 1);
  }
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= grid_resolution;
  Engine engine(model, {profile}, noise);
  double best = -std::numeric_limits<double>::infinity();
  std::vector<double> values;
  for (std::int64_t start = 0; start < total;) {
    const int G = static_cast<int>(
        std::min<std::int64_t>(kMaxBruteforceChunk, total - start));
    EtaBank bank = ConstantBank(model.graph, G, 0.0);
    for (int c = 0; c < G; ++c) {
      std::int64_t code = start + c;
      for (int i = 0; i < n; ++i) {
        bank.params[i](0, c) = grid[code % grid_resolution];
        code /= grid_resolution;
      }
    }
    engine.Run(std::vector<int>(G, 0), bank, &values, nullptr);
    for (double v : values) best = std::max(best, v);
    start += G;
  }
  return best;
}

std::int64_t UcbCallCount() { return ucb_calls; }
void ResetUcbCallCount() { ucb_calls = 0; }
void RecordUcbCalls(std::int64_t count) { ucb_calls += count; }

}  // namespace acbo
