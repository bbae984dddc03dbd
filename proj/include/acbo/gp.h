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

#ifndef ACBO_GP_H_
#define ACBO_GP_H_

#include <cstdint>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "acbo/kernel.h"

namespace acbo {

// Floor applied to the noise variance on the diagonal of K + lambda^2 I.
inline constexpr double kJitterFloor = 1e-8;

// Exact zero-mean GP posterior over one node's mechanism.
//
// Observations at bit-identical inputs are merged: c copies of an input with
// targets y_1..y_c are equivalent, for the posterior, to one observation of
// mean(y) with noise variance lambda^2 / c. The factorization therefore
// grows with the number of distinct inputs only, which keeps discrete action
// spaces cheap over long horizons.
class GpPosterior {
 public:
  GpPosterior(Kernel kernel, double noise_scale);

  const Kernel& kernel() const { return kernel_; }
  double noise_scale() const { return noise_scale_; }
  int dim() const { return kernel_.dim(); }
  // Number of observations, counting repeats.
  int size() const { return total_count_; }
  int distinct_size() const { return static_cast<int>(counts_.size()); }

  // Throws kDimensionMismatch, kCholeskyFailure.
  void Add(std::span<const double> input, double target);
  GpPosterior WithObservation(std::span<const double> input,
                              double target) const;

  double Mean(std::span<const double> query) const;
  double Variance(std::span<const double> query) const;

  // Batched prediction at the columns of `queries` (d x r). Gradient outputs
  // are d x r and skipped when null.
  struct Batch {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;
    Eigen::MatrixXd dmean;
    Eigen::MatrixXd dsd;
  };
  void Predict(const Eigen::MatrixXd& queries, bool with_gradients,
               Batch* out) const;

  // (K + diag(lambda^2 / c))^-1 over the distinct inputs. Prediction through
  // an explicit inverse trades a little accuracy for one GEMM per batch; the
  // UCB oracle uses it for large lockstep batches.
  Eigen::MatrixXd InverseGram() const;
  void PredictWithInverse(const Eigen::MatrixXd& inverse,
                          const Eigen::MatrixXd& queries, bool with_gradients,
                          Batch* out) const;

  // 1/2 log det(I + lambda^-2 K) over every observation, repeats included.
  double InformationGain() const;

 private:
  double Lambda2() const;
  void Refactor();
  // Shared tail of the two prediction paths: given k_q and w = A^-1 k_q.
  void FinishPrediction(const Eigen::MatrixXd& q, const Eigen::MatrixXd& kq,
                        const Eigen::MatrixXd& g, const Eigen::MatrixXd& w,
                        const Eigen::VectorXd& var, bool with_gradients,
                        Batch* out) const;
  void PriorPrediction(const Eigen::MatrixXd& q, bool with_gradients,
                       Batch* out) const;
  Eigen::VectorXd PriorDiag(const Eigen::MatrixXd& q) const;

  Kernel kernel_;
  double noise_scale_;
  int total_count_ = 0;
  double extra_jitter_ = 0.0;
  Eigen::MatrixXd x_;        // d x n distinct inputs
  std::vector<int> counts_;  // repeats per distinct input
  Eigen::VectorXd sums_;     // target sums per distinct input
  Eigen::MatrixXd chol_;     // lower factor of K + diag(lambda^2 / c)
  Eigen::VectorXd alpha_;
  std::unordered_map<std::string, int> index_;
};

using GpSnapshot = std::shared_ptr<const GpPosterior>;

// 1/2 log det(I + lambda^-2 K) on the given inputs, computed densely.
double InformationGain(const std::vector<std::vector<double>>& inputs,
                       const Kernel& kernel, double noise_scale);

struct BetaSchedule {
  enum class Kind { kConstant, kLemma1 };

  Kind kind = Kind::kConstant;
  double constant_value = 2.0;
  double rkhs_bound = 1.0;
  double delta = 0.1;
  int node_count = 1;
  double noise_scale = 0.1;

  // Throws kInvalidArgument when t < 1 or gamma < 0.
  double At(int t, double gamma) const;
};

}  // namespace acbo

#endif  // ACBO_GP_H_
