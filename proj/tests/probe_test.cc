/*
 * Copyright 2026 The pairprobe Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "pairprobe/probe.h"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.h"
#include "pairprobe/error.h"

namespace pairprobe {
namespace {

Eigen::VectorXd Theta(const ProbeModel& m) {
  Eigen::VectorXd t(m.weights.size() + 1);
  t << m.weights, m.bias;
  return t;
}

TEST(Standardizer, HandValues) {
  Eigen::MatrixXd x(2, 1);
  x << 1, 3;
  const Standardizer s = FitStandardizer(x);
  EXPECT_EQ(s.mean[0], 2.0);
  EXPECT_EQ(s.scale[0], 1.0);

  Eigen::MatrixXd c(2, 1);
  c << 5, 5;
  const Standardizer sc = FitStandardizer(c);
  EXPECT_EQ(sc.mean[0], 5.0);
  EXPECT_EQ(sc.scale[0], 1.0);
}

TEST(Standardizer, FixedPointOnStandardizedColumn) {
  Eigen::MatrixXd x(4, 1);
  x << -1.5, -0.5, 0.5, 1.5;
  x /= std::sqrt(1.25);
  const Standardizer s = FitStandardizer(x);
  EXPECT_NEAR(s.mean[0], 0.0, 1e-15);
  EXPECT_NEAR(s.scale[0], 1.0, 1e-15);
  EXPECT_THROW(FitStandardizer(Eigen::MatrixXd(0, 3)), Error);
}

TEST(Sigmoid, ScalarValues) {
  EXPECT_EQ(Logit(0.5), 0.0);
  EXPECT_NEAR(Sigmoid(1.3863), 0.8000, 5e-5);
  EXPECT_NEAR(Sigmoid(std::log(4.0)), 0.8, 1e-15);
  EXPECT_NEAR(Logit(0.999), 6.9068, 5e-5);
  EXPECT_NEAR(Logit(0.999), oracle::Logit(0.999), 1e-12);
  EXPECT_TRUE(std::isfinite(Logit(0.0)));
  EXPECT_TRUE(std::isfinite(Logit(1.0)));
  EXPECT_THROW(Logit(1.5), Error);
  EXPECT_EQ(Sigmoid(-800.0), 0.0);
  EXPECT_EQ(Sigmoid(800.0), 1.0);
}

TEST(Sigmoid, LogitRoundTrip) {
  for (double p = 1e-6; p < 1.0 - 1e-6; p += 0.013) {
    EXPECT_NEAR(Sigmoid(Logit(p)), p, 1e-9);
  }
  EXPECT_NEAR(Sigmoid(Logit(1e-6)), 1e-6, 1e-9);
  EXPECT_NEAR(Sigmoid(Logit(1 - 1e-6)), 1 - 1e-6, 1e-9);
}

TEST(ProbeModel, ScalarPredictions) {
  ProbeModel zero;
  zero.standardizer = {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
  zero.weights = Eigen::VectorXd::Zero(2);
  EXPECT_EQ(zero.PredictProba(std::vector<double>{3.0, -7.0}), 0.5);

  ProbeModel one;
  one.standardizer = {Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 0.5)};
  one.weights = Eigen::VectorXd::Ones(1);
  // Raw 2.0 standardizes to 2.
  EXPECT_NEAR(one.PredictProba(std::vector<double>{2.0}), oracle::Sigmoid(2.0), 1e-15);
  EXPECT_NEAR(one.PredictProba(std::vector<double>{2.0}), 0.8808, 5e-5);
  EXPECT_THROW(one.PredictProba(std::vector<double>{NAN}), Error);
  EXPECT_THROW(one.PredictProba(std::vector<double>{1.0, 2.0}), Error);

  one.weights[0] = 1e6;
  const double p = one.PredictProba(std::vector<double>{2.0});
  EXPECT_LE(p, 1.0 - 1e-12);
  EXPECT_GT(p, 0.5);
}

TEST(FitProbe, SeparableTwoPoints) {
  Eigen::MatrixXd x(2, 1);
  x << -1, 1;
  const std::vector<int> y{0, 1};
  const ProbeFit fit = FitProbe(x, y);
  ASSERT_TRUE(fit.report.converged);
  EXPECT_GT(fit.model.PredictProba(std::vector<double>{1.0}),
            fit.model.PredictProba(std::vector<double>{-1.0}));
  // 0.5 w^2 <= J(0) = 2 C log 2 bounds the weight.
  EXPECT_LE(std::abs(fit.model.weights[0]), std::sqrt(4 * 0.01 * std::log(2.0)));
  EXPECT_NEAR(fit.model.bias, 0.0, 1e-12);

  const Eigen::MatrixXd xs = fit.model.standardizer.TransformRows(x);
  const Eigen::VectorXd ref = oracle::GradientDescent(xs, y, 0.01, 2000);
  EXPECT_NEAR(fit.model.weights[0], ref[0], 1e-9);
  EXPECT_NEAR(fit.model.bias, ref[1], 1e-9);
}

TEST(FitProbe, NullProblem) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(6, 3);
  const std::vector<int> y{0, 1, 0, 1, 0, 1};
  const ProbeFit fit = FitProbe(x, y);
  EXPECT_EQ(fit.model.weights.norm(), 0.0);
  EXPECT_NEAR(fit.model.bias, 0.0, 1e-15);
  EXPECT_NEAR(fit.model.PredictProba(std::vector<double>{1, 2, 3}), 0.5, 1e-15);
}

TEST(FitProbe, Preconditions) {
  Eigen::MatrixXd x(3, 1);
  x << 1, 2, 3;
  try {
    FitProbe(x, std::vector<int>{1, 1, 1});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kMissingClass);
    EXPECT_STREQ(e.what(), "single-class training set");
  }
  EXPECT_THROW(FitProbe(x, std::vector<int>{0, 1}), Error);
  EXPECT_THROW(FitProbe(Eigen::MatrixXd(1, 1), std::vector<int>{1}), Error);
  x(1, 0) = INFINITY;
  EXPECT_THROW(FitProbe(x, std::vector<int>{0, 1, 0}), Error);
}

TEST(FitProbe, MatchesReferenceSolver) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const oracle::Problem pr = oracle::RandomProblem(rng, 30, 3);
    const ProbeFit fit = FitProbe(pr.x, pr.y);
    ASSERT_TRUE(fit.report.converged);
    const Eigen::MatrixXd xs = fit.model.standardizer.TransformRows(pr.x);
    const Eigen::VectorXd ref = oracle::GradientDescent(xs, pr.y, 0.01, 20000);
    // A gradient tolerance of 1e-8 pins the optimum to about 1e-7 here.
    EXPECT_LT((Theta(fit.model) - ref).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE(oracle::ObjectiveGradient(xs, pr.y, Theta(fit.model), 0.01).norm(), 1e-8);
  }
}

TEST(FitProbe, RandomProblemProperties) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> n_dist(4, 50), p_dist(1, 10);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 60; ++trial) {
    const oracle::Problem pr = oracle::RandomProblem(rng, n_dist(rng), p_dist(rng));
    const ProbeFit fit = FitProbe(pr.x, pr.y);
    const Eigen::MatrixXd xs = fit.model.standardizer.TransformRows(pr.x);
    const Eigen::VectorXd opt = Theta(fit.model);

    // Non-increasing objective and converged gradient.
    const auto& hist = fit.report.loss_history;
    for (std::size_t k = 1; k < hist.size(); ++k) EXPECT_LE(hist[k], hist[k - 1]);
    ASSERT_TRUE(fit.report.converged);
    EXPECT_LE(fit.report.grad_norm, 1e-8);

    // Convexity: no random point beats the optimum.
    const double j_opt = oracle::Objective(xs, pr.y, opt, 0.01);
    for (int k = 0; k < 10; ++k) {
      Eigen::VectorXd t = opt;
      for (Eigen::Index i = 0; i < t.size(); ++i) t[i] += normal(rng);
      EXPECT_GE(oracle::Objective(xs, pr.y, t, 0.01), j_opt - 1e-8 * (1 + std::abs(j_opt)));
    }

    // Analytic gradient against central differences at random points.
    auto f = [&](const Eigen::VectorXd& t) { return oracle::Objective(xs, pr.y, t, 0.01); };
    for (int k = 0; k < 10; ++k) {
      Eigen::VectorXd t(opt.size());
      for (Eigen::Index i = 0; i < t.size(); ++i) t[i] = normal(rng);
      Eigen::VectorXd g;
      const double j = ProbeObjective(xs, pr.y, t.head(t.size() - 1), t[t.size() - 1], 0.01, &g);
      EXPECT_NEAR(j, f(t), 1e-10 * (1 + std::abs(j)));
      const Eigen::VectorXd fd = oracle::FiniteDifferenceGradient(f, t);
      EXPECT_LE((g - fd).cwiseAbs().maxCoeff(), 1e-4);
    }

    // Objective difference agrees with the direct difference.
    Eigen::VectorXd t = opt;
    t[0] += 0.1;
    const double delta = ProbeObjectiveDelta(xs, pr.y, opt.head(opt.size() - 1), opt[opt.size() - 1],
                                             t.head(t.size() - 1), t[t.size() - 1], 0.01);
    EXPECT_NEAR(delta, f(t) - f(opt), 1e-10);
  }
}

TEST(FitProbe, DeterministicAndScaleInvariant) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 10; ++trial) {
    const oracle::Problem pr = oracle::RandomProblem(rng, 40, 5);
    const ProbeFit a = FitProbe(pr.x, pr.y);
    const ProbeFit b = FitProbe(pr.x, pr.y);
    EXPECT_EQ(a.model.weights, b.model.weights);
    EXPECT_EQ(a.model.bias, b.model.bias);

    Eigen::VectorXd k(pr.x.cols());
    for (Eigen::Index j = 0; j < k.size(); ++j) k[j] = scale(rng);
    const Eigen::MatrixXd scaled = pr.x * k.asDiagonal();
    const ProbeFit c = FitProbe(scaled, pr.y);
    for (Eigen::Index i = 0; i < pr.x.rows(); ++i) {
      const Eigen::VectorXd raw = pr.x.row(i).transpose();
      const Eigen::VectorXd sc = scaled.row(i).transpose();
      EXPECT_NEAR(a.model.PredictProba(std::span<const double>(raw.data(), raw.size())),
                  c.model.PredictProba(std::span<const double>(sc.data(), sc.size())), 1e-6);
    }
  }
}

TEST(FitProbe, RegularizationStrength) {
  std::mt19937_64 rng(13);
  const oracle::Problem pr = oracle::RandomProblem(rng, 50, 4);
  const ProbeFit weak = FitProbe(pr.x, pr.y, ProbeConfig{1.0, 1e-8, 200});
  const ProbeFit strong = FitProbe(pr.x, pr.y, ProbeConfig{0.01, 1e-8, 200});
  EXPECT_LT(strong.model.weights.norm(), weak.model.weights.norm());
}

TEST(FitProbe, SuppliedStandardizerIsKept) {
  std::mt19937_64 rng(17);
  const oracle::Problem pr = oracle::RandomProblem(rng, 20, 2);
  Standardizer identity{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Ones(2)};
  const ProbeFit fit = FitProbe(pr.x, pr.y, identity, ProbeConfig{});
  EXPECT_EQ(fit.model.standardizer.mean, identity.mean);
  EXPECT_EQ(fit.model.standardizer.scale, identity.scale);
  const Eigen::VectorXd ref = oracle::GradientDescent(pr.x, pr.y, 0.01, 20000);
  EXPECT_LT((Theta(fit.model) - ref).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(RowsToMatrix, RaggedRows) {
  EXPECT_THROW(RowsToMatrix({{1.0, 2.0}, {3.0}}), Error);
  const Eigen::MatrixXd m = RowsToMatrix({{1.0, 2.0}, {3.0, 4.0}});
  EXPECT_EQ(m(1, 0), 3.0);
}

}  // namespace
}  // namespace pairprobe
