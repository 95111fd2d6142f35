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

#ifndef PAIRPROBE_GRPO_H_
#define PAIRPROBE_GRPO_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pairprobe/reward.h"

namespace pairprobe {

inline constexpr int kDefaultGroupSize = 4;

enum class ReturnAggregation { kMean, kSum };

std::string_view AggregationName(ReturnAggregation aggregation);
ReturnAggregation ParseAggregation(std::string_view name);

// Returns of the G rollouts sampled for one prompt.
struct GroupBatch {
  std::vector<double> returns;
  double eps_num = 1e-8;
};

struct TrajectoryReturn {
  std::string trajectory_id;
  std::vector<double> per_step_rewards;
  double value = 0.0;
};

double AggregateReturn(std::span<const double> per_step_rewards,
                       ReturnAggregation aggregation);

TrajectoryReturn MakeTrajectoryReturn(std::string trajectory_id,
                                      std::vector<double> per_step_rewards,
                                      ReturnAggregation aggregation);

double PopulationVariance(std::span<const double> values);

// (R_i - mean R) / (std R + eps_num) with the population std. Throws kConfig
// for groups smaller than two.
std::vector<double> GroupAdvantages(const GroupBatch& batch);

struct GroupVariance {
  double vanilla = 0.0;
  double momentum = 0.0;
};

struct VarianceReport {
  std::vector<GroupVariance> groups;
  int collapsed_vanilla = 0;
  int collapsed_momentum = 0;
  double collapse_threshold = 1e-6;

  double MeanVanilla() const;
  double MeanMomentum() const;
};

// Within-group return variance for the two reward modes, built from the same
// score streams. Throws kDimension when the group structures differ.
VarianceReport VarianceDiagnostic(std::span<const GroupBatch> vanilla,
                                  std::span<const GroupBatch> momentum,
                                  double collapse_threshold = 1e-6);

// Builds one vanilla and one momentum GroupBatch from the clipped score
// streams of a group's trajectories.
struct ModePair {
  GroupBatch vanilla;
  GroupBatch momentum;
};
ModePair GroupFromClippedStreams(
    std::span<const std::vector<double>> clipped_streams, double alpha,
    ReturnAggregation aggregation, double eps_num = 1e-8);

}  // namespace pairprobe

#endif  // PAIRPROBE_GRPO_H_
