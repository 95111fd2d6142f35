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

#ifndef PAIRPROBE_REWARD_H_
#define PAIRPROBE_REWARD_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace pairprobe {

enum class RewardMode { kVanilla, kMomentum };

std::string_view RewardModeName(RewardMode mode);
RewardMode ParseRewardMode(std::string_view name);

struct RewardConfig {
  double temperature = 2.0;
  double clip = 0.05;
  double alpha = 5.0;
  RewardMode mode = RewardMode::kMomentum;

  // Throws kConfig unless T > 0, 0 < clip < 0.5 and alpha >= 0.
  void Validate() const;
};

// clip(sigmoid(logit(s) / T), clip, 1 - clip).
double TemperatureClip(double s, const RewardConfig& config);

// Mean of the clipped scores seen so far, in O(1) state. Before any step has
// been pushed the "mean of earlier steps" is defined as the current score.
class RunningMean {
 public:
  // Mean over earlier steps as seen by step `count() + 1`.
  double MeanBefore(double current) const;
  // Throws kDomain when `step_index` is not `count() + 1`.
  void Push(std::size_t step_index, double s_tilde);
  std::size_t count() const { return count_; }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
};

struct RewardStep {
  double s_final = 0.0;
  double s_tilde = 0.0;
  double running_mean_before = 0.0;
  double bonus = 0.0;
  double reward = 0.0;
  bool operator==(const RewardStep&) const = default;
};

struct RewardTrace {
  std::vector<RewardStep> steps;
  std::vector<double> Rewards() const;
  bool operator==(const RewardTrace&) const = default;
};

// Per-step rewards r_t = sigmoid(logit(s~_t) + alpha (s~_t - mean_{<t})) over
// the temperature-clipped scores; Vanilla mode returns r_t = s~_t.
RewardTrace MomentumReward(std::span<const double> s_final,
                           const RewardConfig& config);

// Same recursion over scores that are already clipped. `s_final` in the
// returned trace mirrors the inputs.
RewardTrace MomentumRewardFromClipped(std::span<const double> s_tilde,
                                      double alpha, RewardMode mode);

}  // namespace pairprobe

#endif  // PAIRPROBE_REWARD_H_
