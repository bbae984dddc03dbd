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

#ifndef ACBO_KERNEL_H_
#define ACBO_KERNEL_H_

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "acbo/error.h"

namespace acbo {

// Covariance function on R^d with per-dimension lengthscales.
//
//   rbf:      v * exp(-r^2 / 2)
//   matern52: v * (1 + sqrt5 r + 5 r^2 / 3) * exp(-sqrt5 r)
//   linear:   v * sum_d s_d x_d / l_d^2
//
// where r is the lengthscale-scaled Euclidean distance. Stationary kinds
// satisfy k(s, s) = v <= 1; the linear kernel is bounded by 1 only when
// v * sum_d (s_d / l_d)^2 <= 1 on the input domain.
struct Kernel {
  enum class Kind { kRbf, kMatern52, kLinear };

  Kind kind = Kind::kRbf;
  std::vector<double> lengthscales;
  double variance_scale = 1.0;

  static Kernel Rbf(int dim, double lengthscale = 0.2, double variance = 1.0);
  static Kernel Matern52(int dim, double lengthscale = 0.2,
                         double variance = 1.0);
  static Kernel Linear(int dim, double lengthscale = 1.0,
                       double variance = 1.0);

  int dim() const { return static_cast<int>(lengthscales.size()); }
  bool stationary() const { return kind != Kind::kLinear; }

  double operator()(std::span<const double> a, std::span<const double> b) const;
  double Diag(std::span<const double> s) const;
};

Status ValidateKernel(const Kernel& kernel);
Kernel::Kind KernelKindFromName(const std::string& name);
std::string KernelKindName(Kernel::Kind kind);

// Points are stored column-wise: X is d x n.
Eigen::MatrixXd Gram(const Kernel& kernel, const Eigen::MatrixXd& x);
Eigen::MatrixXd CrossGram(const Kernel& kernel, const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& q);

// For stationary kernels, dk(q_r, x_j)/dq_rd = -g_jr * (q_rd - x_jd) / l_d^2.
// Fills k (n x r) and g (n x r) in one pass.
void CrossGramWithRadial(const Kernel& kernel, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& q, Eigen::MatrixXd* k,
                         Eigen::MatrixXd* g);

}  // namespace acbo

#endif  // ACBO_KERNEL_H_
