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

#include "acbo/gp.h"

#include <cmath>
#include <string>

namespace acbo {
namespace {

std::string Key(std::span<const double> x) {
  return std::string(reinterpret_cast<const char*>(x.data()),
                     x.size() * sizeof(double));
}

// In-place lower Cholesky; returns false on a nonpositive pivot.
bool Cholesky(Eigen::MatrixXd& a) {
  Eigen::LLT<Eigen::Ref<Eigen::MatrixXd>> llt(a);
  return llt.info() == Eigen::Success;
}

constexpr int kJitterRetries = 4;

}  // namespace

GpPosterior::GpPosterior(Kernel kernel, double noise_scale)
    : kernel_(std::move(kernel)), noise_scale_(noise_scale) {
  Status s = ValidateKernel(kernel_);
  if (!s.ok()) Fail(s.code, s.message);
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    Fail(ErrorCode::kInvalidArgument, "noise_scale must be >= 0");
  }
  x_.resize(kernel_.dim(), 0);
}

double GpPosterior::Lambda2() const {
  return std::max(noise_scale_ * noise_scale_, kJitterFloor);
}

void GpPosterior::Refactor() {
  const int n = distinct_size();
  Eigen::MatrixXd base = Gram(kernel_, x_);
  for (int j = 0; j < n; ++j) base(j, j) += Lambda2() / counts_[j];
  extra_jitter_ = 0.0;
  for (int attempt = 0; attempt <= kJitterRetries; ++attempt) {
    Eigen::MatrixXd a = base;
    if (attempt > 0) {
      extra_jitter_ = kJitterFloor * std::ldexp(1.0, attempt - 1);
      a.diagonal().array() += extra_jitter_;
    }
    if (Cholesky(a)) {
      chol_ = a.triangularView<Eigen::Lower>();
      alpha_.resize(n);
      for (int j = 0; j < n; ++j) alpha_[j] = sums_[j] / counts_[j];
      chol_.triangularView<Eigen::Lower>().solveInPlace(alpha_);
      chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
      return;
    }
  }
  Fail(ErrorCode::kCholeskyFailure,
       "K + lambda^2 I not positive definite after jitter retries");
}

void GpPosterior::Add(std::span<const double> input, double target) {
  if (static_cast<int>(input.size()) != dim()) {
    Fail(ErrorCode::kDimensionMismatch,
         "input has dimension " + std::to_string(input.size()) +
             ", kernel expects " + std::to_string(dim()));
  }
  if (!std::isfinite(target)) {
    Fail(ErrorCode::kInvalidArgument, "target is not finite");
  }
  ++total_count_;
  std::string key = Key(input);
  auto it = index_.find(key);
  if (it != index_.end()) {
    ++counts_[it->second];
    sums_[it->second] += target;
    Refactor();
    return;
  }
  const int n = distinct_size();
  index_.emplace(std::move(key), n);
  x_.conservativeResize(Eigen::NoChange, n + 1);
  for (int d = 0; d < dim(); ++d) x_(d, n) = input[d];
  counts_.push_back(1);
  sums_.conservativeResize(n + 1);
  sums_[n] = target;

  // Append one row to the factor; fall back to a full refactor (with jitter
  // retries) when the new pivot is not safely positive.
  if (extra_jitter_ == 0.0) {
    Eigen::MatrixXd xn = x_.col(n);
    Eigen::VectorXd k = CrossGram(kernel_, x_.leftCols(n), xn);
    double kss = kernel_.Diag(std::span<const double>(xn.data(), dim()));
    Eigen::VectorXd l = chol_.triangularView<Eigen::Lower>().solve(k);
    double pivot = kss + Lambda2() - l.squaredNorm();
    if (pivot > kJitterFloor * 1e-3) {
      chol_.conservativeResize(n + 1, n + 1);
      chol_.row(n).head(n) = l.transpose();
      chol_.col(n).setZero();
      chol_(n, n) = std::sqrt(pivot);
      alpha_.resize(n + 1);
      for (int j = 0; j <= n; ++j) alpha_[j] = sums_[j] / counts_[j];
      chol_.triangularView<Eigen::Lower>().solveInPlace(alpha_);
      chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(alpha_);
      return;
    }
  }
  Refactor();
}

GpPosterior GpPosterior::WithObservation(std::span<const double> input,
                                         double target) const {
  GpPosterior copy = *this;
  copy.Add(input, target);
  return copy;
}

double GpPosterior::Mean(std::span<const double> query) const {
  Batch b;
  Predict(Eigen::Map<const Eigen::MatrixXd>(query.data(), query.size(), 1),
          false, &b);
  return b.mean[0];
}

double GpPosterior::Variance(std::span<const double> query) const {
  Batch b;
  Predict(Eigen::Map<const Eigen::MatrixXd>(query.data(), query.size(), 1),
          false, &b);
  return b.sd[0] * b.sd[0];
}

Eigen::VectorXd GpPosterior::PriorDiag(const Eigen::MatrixXd& q) const {
  const int r = static_cast<int>(q.cols());
  Eigen::VectorXd kss(r);
  if (kernel_.stationary()) {
    kss.setConstant(kernel_.variance_scale);
  } else {
    for (int c = 0; c < r; ++c) {
      kss[c] = kernel_.Diag(std::span<const double>(q.col(c).data(), dim()));
    }
  }
  return kss;
}

void GpPosterior::PriorPrediction(const Eigen::MatrixXd& q, bool with_gradients,
                                  Batch* out) const {
  const int r = static_cast<int>(q.cols());
  out->mean.setZero(r);
  out->sd = PriorDiag(q).cwiseSqrt();
  if (!with_gradients) return;
  out->dmean.setZero(dim(), r);
  out->dsd.setZero(dim(), r);
  if (kernel_.stationary()) return;
  // d sqrt(k(s,s)) / ds = (1/2) k'(s,s) / sd.
  for (int c = 0; c < r; ++c) {
    if (out->sd[c] <= 1e-12) continue;
    for (int d = 0; d < dim(); ++d) {
      double inv_l2 = 1.0 / (kernel_.lengthscales[d] * kernel_.lengthscales[d]);
      out->dsd(d, c) = kernel_.variance_scale * q(d, c) * inv_l2 / out->sd[c];
    }
  }
}

void GpPosterior::Predict(const Eigen::MatrixXd& q, bool with_gradients,
                          Batch* out) const {
  if (q.rows() != dim()) {
    Fail(ErrorCode::kDimensionMismatch, "query dimension mismatch");
  }
  if (distinct_size() == 0) return PriorPrediction(q, with_gradients, out);
  Eigen::MatrixXd kq, g;
  if (kernel_.stationary() && with_gradients) {
    CrossGramWithRadial(kernel_, x_, q, &kq, &g);
  } else {
    kq = CrossGram(kernel_, x_, q);
  }
  Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(kq);
  Eigen::VectorXd var = PriorDiag(q) - v.colwise().squaredNorm().transpose();
  if (with_gradients) {
    chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(v);
  }
  FinishPrediction(q, kq, g, v, var, with_gradients, out);
}

Eigen::MatrixXd GpPosterior::InverseGram() const {
  const int n = distinct_size();
  Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(n, n);
  chol_.triangularView<Eigen::Lower>().solveInPlace(inv);
  chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(inv);
  return 0.5 * (inv + inv.transpose());
}

void GpPosterior::PredictWithInverse(const Eigen::MatrixXd& inverse,
                                     const Eigen::MatrixXd& q,
                                     bool with_gradients, Batch* out) const {
  if (q.rows() != dim()) {
    Fail(ErrorCode::kDimensionMismatch, "query dimension mismatch");
  }
  if (distinct_size() == 0) return PriorPrediction(q, with_gradients, out);
  if (inverse.rows() != distinct_size()) {
    Fail(ErrorCode::kDimensionMismatch, "stale inverse Gram matrix");
  }
  Eigen::MatrixXd kq, g;
  if (kernel_.stationary() && with_gradients) {
    CrossGramWithRadial(kernel_, x_, q, &kq, &g);
  } else {
    kq = CrossGram(kernel_, x_, q);
  }
  Eigen::MatrixXd w;
  w.noalias() = inverse * kq;
  Eigen::VectorXd var =
      PriorDiag(q) - kq.cwiseProduct(w).colwise().sum().transpose();
  FinishPrediction(q, kq, g, w, var, with_gradients, out);
}

void GpPosterior::FinishPrediction(const Eigen::MatrixXd& q,
                                   const Eigen::MatrixXd& kq,
                                   const Eigen::MatrixXd& g,
                                   const Eigen::MatrixXd& w,
                                   const Eigen::VectorXd& var,
                                   bool with_gradients, Batch* out) const {
  const int r = static_cast<int>(q.cols());
  out->mean.noalias() = kq.transpose() * alpha_;
  out->sd = var.cwiseMax(0.0).cwiseSqrt();
  if (!with_gradients) return;

  Eigen::VectorXd inv_l2(dim());
  for (int d = 0; d < dim(); ++d) {
    inv_l2[d] = 1.0 / (kernel_.lengthscales[d] * kernel_.lengthscales[d]);
  }
  out->dmean.resize(dim(), r);
  out->dsd.setZero(dim(), r);
  Eigen::MatrixXd dvar(dim(), r);
  if (kernel_.stationary()) {
    // sum_j c_j dk_j/dq_d = -(q_d * sum_j c_j g_j - sum_j c_j g_j x_jd) / l_d^2
    Eigen::MatrixXd a = g.array().colwise() * alpha_.array();
    Eigen::MatrixXd b = g.cwiseProduct(w);
    Eigen::MatrixXd xa = x_ * a;
    Eigen::MatrixXd xb = x_ * b;
    Eigen::RowVectorXd sa = a.colwise().sum();
    Eigen::RowVectorXd sb = b.colwise().sum();
    for (int c = 0; c < r; ++c) {
      for (int d = 0; d < dim(); ++d) {
        out->dmean(d, c) = -inv_l2[d] * (q(d, c) * sa[c] - xa(d, c));
        dvar(d, c) = 2.0 * inv_l2[d] * (q(d, c) * sb[c] - xb(d, c));
      }
    }
  } else {
    const double s = kernel_.variance_scale;
    Eigen::VectorXd xa = x_ * alpha_;
    Eigen::MatrixXd xw = x_ * w;
    for (int c = 0; c < r; ++c) {
      for (int d = 0; d < dim(); ++d) {
        out->dmean(d, c) = s * inv_l2[d] * xa[d];
        dvar(d, c) = 2.0 * s * inv_l2[d] * (q(d, c) - xw(d, c));
      }
    }
  }
  for (int c = 0; c < r; ++c) {
    if (out->sd[c] > 1e-12) {
      out->dsd.col(c) = dvar.col(c) / (2.0 * out->sd[c]);
    }
  }
}

double GpPosterior::InformationGain() const {
  const int n = distinct_size();
  if (n == 0) return 0.0;
  double logdet = 2.0 * chol_.diagonal().array().log().sum();
  double log_counts = 0.0;
  for (int c : counts_) log_counts += std::log(static_cast<double>(c));
  return std::max(0.0, 0.5 * (logdet - n * std::log(Lambda2()) + log_counts));
}

double InformationGain(const std::vector<std::vector<double>>& inputs,
                       const Kernel& kernel, double noise_scale) {
  if (inputs.empty()) {
    Fail(ErrorCode::kInvalidArgument, "information gain needs inputs");
  }
  const int n = static_cast<int>(inputs.size());
  Eigen::MatrixXd x(kernel.dim(), n);
  for (int j = 0; j < n; ++j) {
    if (static_cast<int>(inputs[j].size()) != kernel.dim()) {
      Fail(ErrorCode::kDimensionMismatch, "input dimension mismatch");
    }
    for (int d = 0; d < kernel.dim(); ++d) x(d, j) = inputs[j][d];
  }
  double lambda2 = std::max(noise_scale * noise_scale, kJitterFloor);
  Eigen::MatrixXd a = Gram(kernel, x) / lambda2;
  a.diagonal().array() += 1.0;
  if (!Cholesky(a)) {
    Fail(ErrorCode::kCholeskyFailure, "I + K / lambda^2 not positive definite");
  }
  return a.diagonal().array().log().sum();
}

double BetaSchedule::At(int t, double gamma) const {
  if (t < 1) Fail(ErrorCode::kInvalidArgument, "beta schedule needs t >= 1");
  if (!(gamma >= 0.0)) {
    Fail(ErrorCode::kInvalidArgument, "information gain must be >= 0");
  }
  if (kind == Kind::kConstant) return constant_value;
  double log_term = std::log(static_cast<double>(node_count) / delta);
  return rkhs_bound +
         noise_scale * std::sqrt(2.0 * (gamma + std::max(0.0, log_term)));
}

}  // namespace acbo
