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

#include "pairprobe/reward.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "pairprobe/error.h"
#include "pairprobe/probe.h"

namespace pairprobe {

std::string_view RewardModeName(RewardMode mode) {
  return mode == RewardMode::kVanilla ? "vanilla" : "momentum";
}

RewardMode ParseRewardMode(std::string_view name) {
  if (name == "vanilla") return RewardMode::kVanilla;
  if (name == "momentum") return RewardMode::kMomentum;
  Fail(ErrorCategory::kConfig, "unknown reward mode '" + std::string(name) + "'");
}

void RewardConfig::Validate() const {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    Fail(ErrorCategory::kConfig, "temperature must be positive");
  }
  if (!(clip > 0.0 && clip < 0.5)) {
    Fail(ErrorCategory::kConfig, "clip must lie in (0, 0.5)");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    Fail(ErrorCategory::kConfig, "alpha must be nonnegative");
  }
}

double TemperatureClip(double s, const RewardConfig& config) {
  config.Validate();
  const double softened = Sigmoid(Logit(s) / config.temperature);
  return std::clamp(softened, config.clip, 1.0 - config.clip);
}

double RunningMean::MeanBefore(double current) const {
  return count_ == 0 ? current : mean_;
}

void RunningMean::Push(std::size_t step_index, double s_tilde) {
  if (step_index != count_ + 1) {
    Fail(ErrorCategory::kDomain, "out-of-order step " +
                                     std::to_string(step_index) +
                                     ", expected " + std::to_string(count_ + 1));
  }
  ++count_;
  // Incremental form: a constant stream keeps the mean exactly constant.
  mean_ += (s_tilde - mean_) / static_cast<double>(count_);
}

std::vector<double> RewardTrace::Rewards() const {
  std::vector<double> out;
  out.reserve(steps.size());
  for (const RewardStep& step : steps) out.push_back(step.reward);
  return out;
}

RewardTrace MomentumRewardFromClipped(std::span<const double> s_tilde,
                                      double alpha, RewardMode mode) {
  if (s_tilde.empty()) Fail(ErrorCategory::kEmptyInput, "empty score stream");
  RewardTrace trace;
  trace.steps.reserve(s_tilde.size());
  RunningMean mean;
  for (std::size_t t = 0; t < s_tilde.size(); ++t) {
    RewardStep step;
    step.s_final = s_tilde[t];
    step.s_tilde = s_tilde[t];
    step.running_mean_before = mean.MeanBefore(step.s_tilde);
    if (mode == RewardMode::kMomentum) {
      // + 0.0 folds a -0.0 product into +0.0.
      step.bonus = alpha * (step.s_tilde - step.running_mean_before) + 0.0;
    }
    // The clamp keeps r_t strictly inside (0, 1) once sigmoid rounds to 1.
    step.reward = step.bonus == 0.0
                      ? step.s_tilde
                      : std::clamp(Sigmoid(Logit(step.s_tilde) + step.bonus),
                                   kProbabilityFloor, 1.0 - kProbabilityFloor);
    mean.Push(t + 1, step.s_tilde);
    trace.steps.push_back(step);
  }
  return trace;
}

RewardTrace MomentumReward(std::span<const double> s_final,
                           const RewardConfig& config) {
  config.Validate();
  if (s_final.empty()) Fail(ErrorCategory::kEmptyInput, "empty score stream");
  std::vector<double> clipped;
  clipped.reserve(s_final.size());
  for (double s : s_final) clipped.push_back(TemperatureClip(s, config));
  RewardTrace trace =
      MomentumRewardFromClipped(clipped, config.alpha, config.mode);
  for (std::size_t t = 0; t < s_final.size(); ++t) {
    trace.steps[t].s_final = s_final[t];
  }
  return trace;
}

}  // namespace pairprobe
