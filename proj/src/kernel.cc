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

#include "acbo/kernel.h"

#include <cmath>

namespace acbo {
namespace {

constexpr double kSqrt5 = 2.2360679774997896964;

Kernel Make(Kernel::Kind kind, int dim, double lengthscale, double variance) {
  Kernel k;
  k.kind = kind;
  k.lengthscales.assign(dim, lengthscale);
  k.variance_scale = variance;
  return k;
}

Eigen::VectorXd InvSquaredLengthscales(const Kernel& kernel) {
  Eigen::VectorXd w(kernel.dim());
  for (int d = 0; d < kernel.dim(); ++d) {
    w[d] = 1.0 / (kernel.lengthscales[d] * kernel.lengthscales[d]);
  }
  return w;
}

// Squared scaled distances between columns of x and q.
Eigen::MatrixXd SquaredDistances(const Kernel& kernel, const Eigen::MatrixXd& x,
                                 const Eigen::MatrixXd& q) {
  Eigen::VectorXd inv_l(kernel.dim());
  for (int d = 0; d < kernel.dim(); ++d) inv_l[d] = 1.0 / kernel.lengthscales[d];
  Eigen::MatrixXd xs = inv_l.asDiagonal() * x;
  Eigen::MatrixXd qs = inv_l.asDiagonal() * q;
  Eigen::MatrixXd d2 = -2.0 * xs.transpose() * qs;
  d2.colwise() += xs.colwise().squaredNorm().transpose();
  d2.rowwise() += qs.colwise().squaredNorm();
  return d2.cwiseMax(0.0);
}

}  // namespace

Kernel Kernel::Rbf(int dim, double lengthscale, double variance) {
  return Make(Kind::kRbf, dim, lengthscale, variance);
}
Kernel Kernel::Matern52(int dim, double lengthscale, double variance) {
  return Make(Kind::kMatern52, dim, lengthscale, variance);
}
Kernel Kernel::Linear(int dim, double lengthscale, double variance) {
  return Make(Kind::kLinear, dim, lengthscale, variance);
}

double Kernel::operator()(std::span<const double> a,
                          std::span<const double> b) const {
  double acc = 0.0;
  if (kind == Kind::kLinear) {
    for (int d = 0; d < dim(); ++d) {
      acc += a[d] * b[d] / (lengthscales[d] * lengthscales[d]);
    }
    return variance_scale * acc;
  }
  for (int d = 0; d < dim(); ++d) {
    double u = (a[d] - b[d]) / lengthscales[d];
    acc += u * u;
  }
  if (kind == Kind::kRbf) return variance_scale * std::exp(-0.5 * acc);
  double r = std::sqrt(acc);
  return variance_scale * (1.0 + kSqrt5 * r + 5.0 / 3.0 * acc) *
         std::exp(-kSqrt5 * r);
}

double Kernel::Diag(std::span<const double> s) const {
  return stationary() ? variance_scale : (*this)(s, s);
}

Status ValidateKernel(const Kernel& kernel) {
  for (double l : kernel.lengthscales) {
    if (!(l > 0.0) || !std::isfinite(l)) {
      return {ErrorCode::kInvalidArgument, "lengthscales must be positive"};
    }
  }
  if (!(kernel.variance_scale > 0.0) || kernel.variance_scale > 1.0) {
    return {ErrorCode::kInvalidArgument, "variance_scale must lie in (0, 1]"};
  }
  return Status::Ok();
}

Kernel::Kind KernelKindFromName(const std::string& name) {
  if (name == "rbf") return Kernel::Kind::kRbf;
  if (name == "matern52") return Kernel::Kind::kMatern52;
  if (name == "linear") return Kernel::Kind::kLinear;
  Fail(ErrorCode::kInvalidConfig, "unknown kernel '" + name + "'");
}

std::string KernelKindName(Kernel::Kind kind) {
  switch (kind) {
    case Kernel::Kind::kRbf: return "rbf";
    case Kernel::Kind::kMatern52: return "matern52";
    case Kernel::Kind::kLinear: return "linear";
  }
  return "rbf";
}

Eigen::MatrixXd Gram(const Kernel& kernel, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd k = CrossGram(kernel, x, x);
  // Exact symmetry and exact diagonal regardless of rounding in the
  // expanded distance formula.
  k = 0.5 * (k + k.transpose()).eval();
  if (kernel.stationary()) k.diagonal().setConstant(kernel.variance_scale);
  return k;
}

Eigen::MatrixXd CrossGram(const Kernel& kernel, const Eigen::MatrixXd& x,
                          const Eigen::MatrixXd& q) {
  if (kernel.kind == Kernel::Kind::kLinear) {
    return kernel.variance_scale * x.transpose() *
           (InvSquaredLengthscales(kernel).asDiagonal() * q);
  }
  Eigen::MatrixXd k, g;
  CrossGramWithRadial(kernel, x, q, &k, nullptr);
  return k;
}

void CrossGramWithRadial(const Kernel& kernel, const Eigen::MatrixXd& x,
                         const Eigen::MatrixXd& q, Eigen::MatrixXd* k,
                         Eigen::MatrixXd* g) {
  if (kernel.kind == Kernel::Kind::kLinear) {
    Fail(ErrorCode::kInvalidArgument, "linear kernel has no radial form");
  }
  Eigen::MatrixXd d2 = SquaredDistances(kernel, x, q);
  const double v = kernel.variance_scale;
  if (kernel.kind == Kernel::Kind::kRbf) {
    *k = v * (-0.5 * d2).array().exp();
    if (g) *g = *k;
    return;
  }
  Eigen::ArrayXXd r = d2.array().sqrt();
  Eigen::ArrayXXd e = (-kSqrt5 * r).exp();
  *k = v * (1.0 + kSqrt5 * r + (5.0 / 3.0) * d2.array()) * e;
  if (g) *g = v * (5.0 / 3.0) * (1.0 + kSqrt5 * r) * e;
}

}  // namespace acbo
