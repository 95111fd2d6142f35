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

#ifndef PAIRPROBE_PROBE_H_
#define PAIRPROBE_PROBE_H_

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pairprobe {

inline constexpr double kProbabilityFloor = 1e-12;

double Sigmoid(double z);
// Clamps p into [1e-12, 1 - 1e-12] first. Throws kDomain for p outside [0,1].
double Logit(double p);

// Per-column centering and scaling; zero-variance columns keep scale 1.
struct Standardizer {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  Eigen::Index size() const { return mean.size(); }
  Eigen::VectorXd Transform(std::span<const double> x) const;
  Eigen::MatrixXd TransformRows(const Eigen::MatrixXd& x) const;
};

Standardizer FitStandardizer(const Eigen::MatrixXd& x);

struct ProbeConfig {
  // Multiplies the data term; the bias is not regularized.
  double reg_c = 0.01;
  double tol = 1e-8;
  int max_iter = 200;
};

struct FitReport {
  double final_loss = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  // Objective value at the initial point followed by the value after each
  // accepted step (previous value plus the computed decrease). Not
  // serialized.
  std::vector<double> loss_history;
};

struct ProbeModel {
  Standardizer standardizer;
  Eigen::VectorXd weights;
  double bias = 0.0;
  double reg_c = 0.01;

  Eigen::Index input_dim() const { return weights.size(); }
  double Margin(std::span<const double> x) const;
  // sigmoid(w . standardize(x) + b), clamped to [1e-12, 1 - 1e-12].
  double PredictProba(std::span<const double> x) const;
};

struct ProbeFit {
  ProbeModel model;
  FitReport report;
};

// Minimizes
//   J(w, b) = reg_c * sum_i log(1 + exp(-z_i (w . x_i + b))) + 0.5 |w|^2
// over standardized rows x_i of `x`, with z_i = 2 y_i - 1. Uses damped Newton
// steps, falling back to gradient steps when the Hessian is ill-conditioned;
// every accepted step is non-increasing in J.
ProbeFit FitProbe(const Eigen::MatrixXd& x, std::span<const int> y,
                  const ProbeConfig& config = {});

// As above with a caller-supplied standardizer instead of one fitted on `x`.
ProbeFit FitProbe(const Eigen::MatrixXd& x, std::span<const int> y,
                  Standardizer standardizer, const ProbeConfig& config);

// J and its gradient [dJ/dw; dJ/db] at (w, b) for already-standardized
// rows. `gradient` may be null.
double ProbeObjective(const Eigen::MatrixXd& xs, std::span<const int> y,
                      const Eigen::VectorXd& w, double b, double reg_c,
                      Eigen::VectorXd* gradient);

// J(w_to, b_to) - J(w_from, b_from), computed term by term so that small
// changes are resolved well below the rounding of J.
double ProbeObjectiveDelta(const Eigen::MatrixXd& xs, std::span<const int> y,
                           const Eigen::VectorXd& w_from, double b_from,
                           const Eigen::VectorXd& w_to, double b_to,
                           double reg_c);

// Copies rows into a dense matrix; throws kDimension on ragged input.
Eigen::MatrixXd RowsToMatrix(const std::vector<std::vector<double>>& rows);

}  // namespace pairprobe

#endif  // PAIRPROBE_PROBE_H_
