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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gp_oracle.h"

namespace acbo {
namespace {

std::vector<double> RandomPoint(std::mt19937_64& rng, int d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(d);
  for (double& v : x) v = u(rng);
  return x;
}

Kernel RandomKernel(std::mt19937_64& rng, int d, int trial) {
  std::uniform_real_distribution<double> ls(0.15, 1.0);
  Kernel k;
  k.kind = static_cast<Kernel::Kind>(trial % 3);
  for (int i = 0; i < d; ++i) k.lengthscales.push_back(ls(rng));
  k.variance_scale = std::uniform_real_distribution<double>(0.3, 1.0)(rng);
  if (k.kind == Kernel::Kind::kLinear) {
    // Keep k(s, s) <= 1 on the unit box.
    for (double& l : k.lengthscales) l = std::sqrt(static_cast<double>(d));
  }
  return k;
}

TEST(KernelTest, ClosedForms) {
  std::vector<double> a = {0.1, 0.4}, b = {0.3, 0.0};
  Kernel rbf = Kernel::Rbf(2, 0.5, 0.8);
  double r2 = (0.2 * 0.2 + 0.4 * 0.4) / 0.25;
  EXPECT_NEAR(rbf(a, b), 0.8 * std::exp(-0.5 * r2), 1e-15);
  Kernel mat = Kernel::Matern52(2, 0.5, 1.0);
  double r = std::sqrt(r2);
  EXPECT_NEAR(mat(a, b),
              (1 + std::sqrt(5.0) * r + 5.0 * r2 / 3.0) *
                  std::exp(-std::sqrt(5.0) * r),
              1e-15);
  Kernel lin = Kernel::Linear(2, 2.0, 0.5);
  EXPECT_NEAR(lin(a, b), 0.5 * (0.03) / 4.0, 1e-15);
  EXPECT_EQ(rbf.Diag(a), 0.8);
}

TEST(KernelTest, GramIsPsd) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    int d = 1 + trial % 4;
    Kernel k = RandomKernel(rng, d, trial);
    Eigen::MatrixXd x(d, 25);
    for (int j = 0; j < 25; ++j) {
      auto p = RandomPoint(rng, d);
      for (int i = 0; i < d; ++i) x(i, j) = p[i];
    }
    Eigen::MatrixXd g = Gram(k, x);
    EXPECT_LE((g - g.transpose()).cwiseAbs().maxCoeff(), 0.0);
    g.diagonal().array() += 1e-8;
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(g).info(), Eigen::Success);
    EXPECT_LE(g.diagonal().maxCoeff(), 1.0 + 1e-8);
  }
}

TEST(KernelTest, ValidatesArguments) {
  Kernel k = Kernel::Rbf(2);
  k.variance_scale = 1.5;
  EXPECT_FALSE(ValidateKernel(k).ok());
  k = Kernel::Rbf(2, -1.0);
  EXPECT_FALSE(ValidateKernel(k).ok());
  EXPECT_THROW(GpPosterior(k, 0.1), Error);
  EXPECT_THROW(KernelKindFromName("poly"), Error);
}

TEST(GpTest, EmptyPosteriorIsPrior) {
  GpPosterior gp(Kernel::Rbf(3, 0.2, 0.7), 0.1);
  std::vector<double> s = {0.3, 0.1, 0.9};
  EXPECT_EQ(gp.Mean(s), 0.0);
  EXPECT_NEAR(gp.Variance(s), 0.7, 1e-15);
}

TEST(GpTest, OnePointClosedForm) {
  const double lambda = 0.3, y = 1.7;
  GpPosterior gp(Kernel::Rbf(2), lambda);
  std::vector<double> s = {0.25, 0.5};
  gp.Add(s, y);
  double l2 = lambda * lambda;
  EXPECT_NEAR(gp.Mean(s), y / (1 + l2), 1e-12);
  EXPECT_NEAR(gp.Variance(s), l2 / (1 + l2), 1e-12);
}

TEST(GpTest, FarQueryRevertsToPrior) {
  GpPosterior gp(Kernel::Rbf(2, 0.2), 0.1);
  gp.Add(std::vector<double>{0.0, 0.0}, 3.0);
  gp.Add(std::vector<double>{0.1, 0.2}, -1.0);
  std::vector<double> far = {20.0, 20.0};
  EXPECT_NEAR(gp.Mean(far), 0.0, 1e-6);
  EXPECT_NEAR(gp.Variance(far), 1.0, 1e-6);
}

TEST(GpTest, DimensionMismatch) {
  GpPosterior gp(Kernel::Rbf(2), 0.1);
  EXPECT_THROW(gp.Add(std::vector<double>{0.0}, 1.0), Error);
  EXPECT_THROW(gp.Mean(std::vector<double>{0.0, 1.0, 2.0}), Error);
}

TEST(GpTest, MatchesDenseOracle) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    int d = 1 + static_cast<int>(rng() % 6);
    int n = 1 + static_cast<int>(rng() % 30);
    Kernel k = RandomKernel(rng, d, trial);
    double lambda = std::uniform_real_distribution<double>(0.05, 0.5)(rng);
    GpPosterior gp(k, lambda);
    std::vector<std::vector<double>> xs;
    std::vector<double> ys;
    for (int j = 0; j < n; ++j) {
      // Every fourth point repeats an earlier input.
      auto x = (j > 0 && j % 4 == 0) ? xs[rng() % xs.size()] : RandomPoint(rng, d);
      double y = std::normal_distribution<double>(0.0, 1.0)(rng);
      xs.push_back(x);
      ys.push_back(y);
      gp.Add(x, y);
    }
    testing_oracle::DenseGp dense(k, lambda, xs, ys);
    for (int q = 0; q < 20; ++q) {
      auto s = q < 3 ? xs[q % n] : RandomPoint(rng, d);
      EXPECT_NEAR(gp.Mean(s), dense.Mean(s), 1e-8) << "trial " << trial;
      EXPECT_NEAR(gp.Variance(s), dense.Variance(s), 1e-8) << "trial " << trial;
    }
    EXPECT_EQ(gp.size(), n);
    EXPECT_NEAR(gp.InformationGain(), InformationGain(xs, k, lambda), 1e-8);
  }
}

TEST(GpTest, BatchedGradientsMatchFiniteDifferences) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 30; ++trial) {
    int d = 1 + trial % 4;
    Kernel k = RandomKernel(rng, d, trial);
    GpPosterior gp(k, 0.1);
    for (int j = 0; j < 12; ++j) {
      gp.Add(RandomPoint(rng, d), std::normal_distribution<double>()(rng));
    }
    Eigen::MatrixXd q(d, 5);
    for (int c = 0; c < 5; ++c) {
      auto p = RandomPoint(rng, d);
      for (int i = 0; i < d; ++i) q(i, c) = p[i];
    }
    GpPosterior::Batch b;
    gp.Predict(q, true, &b);
    const double h = 1e-5;
    for (int c = 0; c < 5; ++c) {
      for (int i = 0; i < d; ++i) {
        Eigen::MatrixXd qp = q.col(c), qm = q.col(c);
        qp(i, 0) += h;
        qm(i, 0) -= h;
        GpPosterior::Batch bp, bm;
        gp.Predict(qp, false, &bp);
        gp.Predict(qm, false, &bm);
        double fd_mean = (bp.mean[0] - bm.mean[0]) / (2 * h);
        double fd_sd = (bp.sd[0] - bm.sd[0]) / (2 * h);
        EXPECT_NEAR(b.dmean(i, c), fd_mean, 1e-5 * (1 + std::abs(fd_mean)));
        EXPECT_NEAR(b.dsd(i, c), fd_sd, 1e-5 * (1 + std::abs(fd_sd)));
      }
      EXPECT_NEAR(b.mean[c], gp.Mean(std::span<const double>(q.col(c).data(), d)),
                  1e-12);
    }
  }
}

TEST(GpTest, InversePathAgreesWithCholeskyPath) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    int d = 1 + trial % 3;
    GpPosterior gp(RandomKernel(rng, d, trial), 0.1);
    for (int j = 0; j < 40; ++j) gp.Add(RandomPoint(rng, d), std::sin(j));
    Eigen::MatrixXd q = Eigen::MatrixXd::Random(d, 16).array() * 0.5 + 0.5;
    GpPosterior::Batch a, b;
    gp.Predict(q, true, &a);
    gp.PredictWithInverse(gp.InverseGram(), q, true, &b);
    EXPECT_LE((a.mean - b.mean).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LE((a.sd - b.sd).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE((a.dmean - b.dmean).cwiseAbs().maxCoeff(), 1e-8);
  }
  GpPosterior empty(Kernel::Rbf(1), 0.1);
  EXPECT_THROW(empty.WithObservation(std::vector<double>{0.1}, 1.0)
                   .PredictWithInverse(Eigen::MatrixXd(2, 2),
                                       Eigen::MatrixXd::Zero(1, 1), false,
                                       nullptr),
               Error);
}

TEST(GpTest, VarianceNeverIncreases) {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    int d = 2;
    GpPosterior gp(RandomKernel(rng, d, trial), 0.2);
    std::vector<std::vector<double>> queries;
    for (int q = 0; q < 30; ++q) queries.push_back(RandomPoint(rng, d));
    std::vector<double> prev;
    for (auto& s : queries) prev.push_back(gp.Variance(s));
    for (int t = 0; t < 25; ++t) {
      auto x = t % 5 == 4 ? queries[t % 30] : RandomPoint(rng, d);
      gp = gp.WithObservation(x, 1.0);
      for (size_t q = 0; q < queries.size(); ++q) {
        double v = gp.Variance(queries[q]);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, gp.kernel().Diag(queries[q]) + 1e-12);
        EXPECT_LE(v, prev[q] + 1e-10);
        prev[q] = v;
      }
    }
  }
}

TEST(GpTest, WithObservationLeavesOriginalUntouched) {
  GpPosterior gp(Kernel::Rbf(1), 0.1);
  GpPosterior next = gp.WithObservation(std::vector<double>{0.5}, 1.0);
  EXPECT_EQ(gp.size(), 0);
  EXPECT_EQ(next.size(), 1);
}

TEST(GpTest, NearDuplicatesWithZeroNoiseSurvive) {
  GpPosterior gp(Kernel::Rbf(1, 0.5), 0.0);
  gp.Add(std::vector<double>{0.5}, 1.0);
  gp.Add(std::vector<double>{0.5 + 1e-13}, 1.0);
  gp.Add(std::vector<double>{0.5}, 1.0);
  EXPECT_NEAR(gp.Mean(std::vector<double>{0.5}), 1.0, 1e-6);
}

TEST(InformationGainTest, SinglePoint) {
  EXPECT_NEAR(InformationGain({{0.3}}, Kernel::Rbf(1), 1.0), 0.5 * std::log(2.0),
              1e-15);
}

TEST(InformationGainTest, DuplicatesGainLess) {
  Kernel k = Kernel::Rbf(1, 0.1);
  double dup = InformationGain({{0.5}, {0.5}, {0.5}}, k, 0.3);
  double spread = InformationGain({{0.0}, {0.5}, {1.0}}, k, 0.3);
  EXPECT_LT(dup, spread);
}

TEST(InformationGainTest, VanishesWithLargeNoise) {
  EXPECT_LT(InformationGain({{0.1}, {0.7}}, Kernel::Rbf(1), 1e6), 1e-11);
  EXPECT_THROW(InformationGain({}, Kernel::Rbf(1), 1.0), Error);
}

TEST(BetaTest, Schedules) {
  BetaSchedule c;
  c.constant_value = 2.0;
  EXPECT_EQ(c.At(1, 0.0), 2.0);
  EXPECT_EQ(c.At(500, 3.0), 2.0);

  BetaSchedule l;
  l.kind = BetaSchedule::Kind::kLemma1;
  l.rkhs_bound = 1.0;
  l.noise_scale = 0.25;
  l.node_count = 2;
  l.delta = 2.0 / std::exp(2.0);  // log(m / delta) = 2
  EXPECT_NEAR(l.At(1, 0.0), 1.5, 1e-12);
  EXPECT_GE(l.At(3, 5.0), l.At(3, 1.0));
  EXPECT_THROW(l.At(0, 0.0), Error);
  EXPECT_THROW(l.At(1, -1.0), Error);
}

}  // namespace
}  // namespace acbo
