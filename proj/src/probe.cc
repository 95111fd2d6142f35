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

#include <algorithm>
#include <cmath>
#include <string>

#include "pairprobe/error.h"

namespace pairprobe {
namespace {

// log(1 + exp(-m)) without overflow.
double LogLoss(double margin) {
  return std::max(-margin, 0.0) + std::log1p(std::exp(-std::abs(margin)));
}

void CheckLabels(std::span<const int> y, Eigen::Index rows) {
  if (static_cast<Eigen::Index>(y.size()) != rows) {
    Fail(ErrorCategory::kDimension, "label count " + std::to_string(y.size()) +
                                        " != row count " +
                                        std::to_string(rows));
  }
  bool has_pos = false;
  bool has_neg = false;
  for (int v : y) {
    if (v != 0 && v != 1) Fail(ErrorCategory::kDomain, "labels must be 0/1");
    has_pos |= v == 1;
    has_neg |= v == 0;
  }
  if (!has_pos || !has_neg) {
    Fail(ErrorCategory::kMissingClass, "single-class training set");
  }
}

// softplus(x) - softplus(y), accurate when x and y are close.
double SoftplusDifference(double x, double y) {
  const double gap = x - y;
  if (std::abs(gap) > 30.0) {
    auto softplus = [](double v) {
      return std::max(v, 0.0) + std::log1p(std::exp(-std::abs(v)));
    };
    return softplus(x) - softplus(y);
  }
  return std::log1p(std::expm1(gap) * Sigmoid(y));
}

}  // namespace

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double Logit(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    Fail(ErrorCategory::kDomain,
         "logit argument " + std::to_string(p) + " outside [0,1]");
  }
  p = std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
  return std::log(p) - std::log1p(-p);
}

Eigen::VectorXd Standardizer::Transform(std::span<const double> x) const {
  if (static_cast<Eigen::Index>(x.size()) != mean.size()) {
    Fail(ErrorCategory::kDimension, "feature vector has length " +
                                        std::to_string(x.size()) +
                                        ", expected " +
                                        std::to_string(mean.size()));
  }
  const Eigen::Map<const Eigen::VectorXd> v(x.data(),
                                            static_cast<Eigen::Index>(x.size()));
  return ((v - mean).array() / scale.array()).matrix();
}

Eigen::MatrixXd Standardizer::TransformRows(const Eigen::MatrixXd& x) const {
  if (x.cols() != mean.size()) {
    Fail(ErrorCategory::kDimension, "matrix has " + std::to_string(x.cols()) +
                                        " columns, expected " +
                                        std::to_string(mean.size()));
  }
  return ((x.rowwise() - mean.transpose()).array().rowwise() /
          scale.transpose().array())
      .matrix();
}

Standardizer FitStandardizer(const Eigen::MatrixXd& x) {
  if (x.rows() < 1 || x.cols() < 1) {
    Fail(ErrorCategory::kEmptyInput, "cannot standardize an empty matrix");
  }
  Standardizer s;
  s.mean = x.colwise().mean().transpose();
  s.scale.resize(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double var =
        (x.col(j).array() - s.mean(j)).square().sum() /
        static_cast<double>(x.rows());
    const double sd = std::sqrt(var);
    s.scale(j) = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

double ProbeModel::Margin(std::span<const double> x) const {
  return weights.dot(standardizer.Transform(x)) + bias;
}

double ProbeModel::PredictProba(std::span<const double> x) const {
  for (double v : x) {
    if (!std::isfinite(v)) Fail(ErrorCategory::kDomain, "non-finite feature");
  }
  return std::clamp(Sigmoid(Margin(x)), kProbabilityFloor,
                    1.0 - kProbabilityFloor);
}

double ProbeObjective(const Eigen::MatrixXd& xs, std::span<const int> y,
                      const Eigen::VectorXd& w, double b, double reg_c,
                      Eigen::VectorXd* gradient) {
  const Eigen::VectorXd margins = (xs * w).array() + b;
  double data_loss = 0.0;
  Eigen::VectorXd coeff(xs.rows());
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const double z = y[i] == 1 ? 1.0 : -1.0;
    data_loss += LogLoss(z * margins(i));
    // d/dm log(1 + exp(-z m)) = -z * sigmoid(-z m)
    coeff(i) = -z * Sigmoid(-z * margins(i));
  }
  if (gradient != nullptr) {
    gradient->resize(w.size() + 1);
    gradient->head(w.size()) = reg_c * (xs.transpose() * coeff) + w;
    (*gradient)(w.size()) = reg_c * coeff.sum();
  }
  return reg_c * data_loss + 0.5 * w.squaredNorm();
}

double ProbeObjectiveDelta(const Eigen::MatrixXd& xs, std::span<const int> y,
                           const Eigen::VectorXd& w_from, double b_from,
                           const Eigen::VectorXd& w_to, double b_to,
                           double reg_c) {
  const Eigen::VectorXd m_from = (xs * w_from).array() + b_from;
  const Eigen::VectorXd m_to = (xs * w_to).array() + b_to;
  double data = 0.0;
  for (Eigen::Index i = 0; i < xs.rows(); ++i) {
    const double z = y[i] == 1 ? 1.0 : -1.0;
    // log(1 + exp(-z m)) = softplus(-z m)
    data += SoftplusDifference(-z * m_to(i), -z * m_from(i));
  }
  const double penalty = 0.5 * (w_to - w_from).dot(w_to + w_from);
  return reg_c * data + penalty;
}

ProbeFit FitProbe(const Eigen::MatrixXd& x, std::span<const int> y,
                  const ProbeConfig& config) {
  if (x.rows() < 2) {
    Fail(ErrorCategory::kEmptyInput, "need at least two training rows");
  }
  return FitProbe(x, y, FitStandardizer(x), config);
}

ProbeFit FitProbe(const Eigen::MatrixXd& x, std::span<const int> y,
                  Standardizer standardizer, const ProbeConfig& config) {
  if (x.rows() < 2) {
    Fail(ErrorCategory::kEmptyInput, "need at least two training rows");
  }
  if (x.cols() < 1) Fail(ErrorCategory::kDimension, "no feature columns");
  if (!x.allFinite()) Fail(ErrorCategory::kDomain, "non-finite feature");
  CheckLabels(y, x.rows());
  if (!(config.reg_c > 0.0) || !(config.tol > 0.0) || config.max_iter < 1) {
    Fail(ErrorCategory::kConfig, "reg_c and tol must be positive");
  }

  const Eigen::Index p = x.cols();
  const double c = config.reg_c;
  ProbeFit fit;
  if (standardizer.size() != x.cols() ||
      standardizer.scale.size() != x.cols() ||
      (standardizer.scale.array() <= 0.0).any()) {
    Fail(ErrorCategory::kDimension, "standardizer does not match features");
  }
  fit.model.standardizer = std::move(standardizer);
  fit.model.reg_c = c;
  const Eigen::MatrixXd xs = fit.model.standardizer.TransformRows(x);

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p + 1);
  Eigen::VectorXd grad;
  double loss = ProbeObjective(xs, y, theta.head(p), theta(p), c, &grad);
  FitReport& report = fit.report;
  report.loss_history.push_back(loss);

  int iter = 0;
  while (iter < config.max_iter && grad.norm() > config.tol) {
    // Hessian of J in (w, b).
    const Eigen::VectorXd margins = (xs * theta.head(p)).array() + theta(p);
    Eigen::VectorXd weights(xs.rows());
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
      const double s = Sigmoid(margins(i));
      weights(i) = c * s * (1.0 - s);
    }
    Eigen::MatrixXd hessian(p + 1, p + 1);
    hessian.topLeftCorner(p, p) =
        xs.transpose() * weights.asDiagonal() * xs;
    hessian.topLeftCorner(p, p).diagonal().array() += 1.0;
    const Eigen::VectorXd cross = xs.transpose() * weights;
    hessian.topRightCorner(p, 1) = cross;
    hessian.bottomLeftCorner(1, p) = cross.transpose();
    hessian(p, p) = weights.sum();

    Eigen::VectorXd direction;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
    bool newton_ok = ldlt.info() == Eigen::Success && ldlt.isPositive() &&
                     ldlt.rcond() > 1e-12;
    if (newton_ok) {
      direction = ldlt.solve(-grad);
      newton_ok = direction.allFinite() && grad.dot(direction) < 0.0;
    }
    if (!newton_ok) direction = -grad;

    const double slope = grad.dot(direction);
    bool accepted = false;
    double step = 1.0;
    for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
      const Eigen::VectorXd candidate = theta + step * direction;
      // The decrease near the optimum is far below the rounding of J itself,
      // so the sufficient-decrease test runs on the directly computed change.
      const double delta = ProbeObjectiveDelta(
          xs, y, theta.head(p), theta(p), candidate.head(p), candidate(p), c);
      if (delta <= 1e-4 * step * slope) {
        theta = candidate;
        loss += delta;
        ProbeObjective(xs, y, theta.head(p), theta(p), c, &grad);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    ++iter;
    report.loss_history.push_back(loss);
  }

  fit.model.weights = theta.head(p);
  fit.model.bias = theta(p);
  report.final_loss = loss;
  report.grad_norm = grad.norm();
  report.iterations = iter;
  report.converged = report.grad_norm <= config.tol;
  return fit;
}

Eigen::MatrixXd RowsToMatrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Eigen::MatrixXd(0, 0);
  const auto cols = static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != cols) {
      Fail(ErrorCategory::kDimension,
           "row " + std::to_string(i) + " has length " +
               std::to_string(rows[i].size()) + ", expected " +
               std::to_string(cols));
    }
    m.row(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::RowVectorXd>(rows[i].data(), cols);
  }
  return m;
}

}  // namespace pairprobe
