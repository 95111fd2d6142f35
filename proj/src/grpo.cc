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

#include "pairprobe/grpo.h"

#include <cmath>
#include <numeric>

#include "pairprobe/error.h"

namespace pairprobe {

std::string_view AggregationName(ReturnAggregation aggregation) {
  return aggregation == ReturnAggregation::kMean ? "mean" : "sum";
}

ReturnAggregation ParseAggregation(std::string_view name) {
  if (name == "mean") return ReturnAggregation::kMean;
  if (name == "sum") return ReturnAggregation::kSum;
  Fail(ErrorCategory::kConfig, "unknown aggregation '" + std::string(name) + "'");
}

double AggregateReturn(std::span<const double> per_step_rewards,
                       ReturnAggregation aggregation) {
  if (per_step_rewards.empty()) {
    Fail(ErrorCategory::kEmptyInput, "trajectory has no rewards");
  }
  const double sum =
      std::accumulate(per_step_rewards.begin(), per_step_rewards.end(), 0.0);
  return aggregation == ReturnAggregation::kSum
             ? sum
             : sum / static_cast<double>(per_step_rewards.size());
}

TrajectoryReturn MakeTrajectoryReturn(std::string trajectory_id,
                                      std::vector<double> per_step_rewards,
                                      ReturnAggregation aggregation) {
  TrajectoryReturn out;
  out.trajectory_id = std::move(trajectory_id);
  out.value = AggregateReturn(per_step_rewards, aggregation);
  out.per_step_rewards = std::move(per_step_rewards);
  return out;
}

double PopulationVariance(std::span<const double> values) {
  if (values.empty()) return 0.0;
  const double n = static_cast<double>(values.size());
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return sq / n;
}

std::vector<double> GroupAdvantages(const GroupBatch& batch) {
  const auto& r = batch.returns;
  if (r.size() < 2) {
    Fail(ErrorCategory::kConfig, "group needs at least two trajectories");
  }
  if (!(batch.eps_num > 0.0)) {
    Fail(ErrorCategory::kConfig, "eps_num must be positive");
  }
  const double n = static_cast<double>(r.size());
  const double mean = std::accumulate(r.begin(), r.end(), 0.0) / n;
  std::vector<double> centered(r.size());
  bool all_equal = true;
  for (std::size_t i = 0; i < r.size(); ++i) {
    centered[i] = r[i] - mean;
    all_equal &= r[i] == r.front();
  }
  if (all_equal) return std::vector<double>(r.size(), 0.0);
  // Re-center so the advantages sum to zero up to rounding of the division.
  const double drift =
      std::accumulate(centered.begin(), centered.end(), 0.0) / n;
  double sq = 0.0;
  for (double& c : centered) {
    c -= drift;
    sq += c * c;
  }
  const double denom = std::sqrt(sq / n) + batch.eps_num;
  for (double& c : centered) c /= denom;
  return centered;
}

double VarianceReport::MeanVanilla() const {
  if (groups.empty()) return 0.0;
  double sum = 0.0;
  for (const GroupVariance& g : groups) sum += g.vanilla;
  return sum / static_cast<double>(groups.size());
}

double VarianceReport::MeanMomentum() const {
  if (groups.empty()) return 0.0;
  double sum = 0.0;
  for (const GroupVariance& g : groups) sum += g.momentum;
  return sum / static_cast<double>(groups.size());
}

VarianceReport VarianceDiagnostic(std::span<const GroupBatch> vanilla,
                                  std::span<const GroupBatch> momentum,
                                  double collapse_threshold) {
  if (vanilla.size() != momentum.size()) {
    Fail(ErrorCategory::kDimension, "vanilla and momentum group counts differ");
  }
  VarianceReport report;
  report.collapse_threshold = collapse_threshold;
  for (std::size_t g = 0; g < vanilla.size(); ++g) {
    if (vanilla[g].returns.size() != momentum[g].returns.size()) {
      Fail(ErrorCategory::kDimension,
           "group " + std::to_string(g) + " differs in size between modes");
    }
    if (vanilla[g].returns.size() < 2) {
      Fail(ErrorCategory::kConfig, "group needs at least two trajectories");
    }
    GroupVariance v;
    v.vanilla = PopulationVariance(vanilla[g].returns);
    v.momentum = PopulationVariance(momentum[g].returns);
    report.collapsed_vanilla += v.vanilla < collapse_threshold ? 1 : 0;
    report.collapsed_momentum += v.momentum < collapse_threshold ? 1 : 0;
    report.groups.push_back(v);
  }
  return report;
}

ModePair GroupFromClippedStreams(
    std::span<const std::vector<double>> clipped_streams, double alpha,
    ReturnAggregation aggregation, double eps_num) {
  ModePair out;
  out.vanilla.eps_num = eps_num;
  out.momentum.eps_num = eps_num;
  for (const std::vector<double>& stream : clipped_streams) {
    const RewardTrace vanilla =
        MomentumRewardFromClipped(stream, alpha, RewardMode::kVanilla);
    const RewardTrace momentum =
        MomentumRewardFromClipped(stream, alpha, RewardMode::kMomentum);
    out.vanilla.returns.push_back(
        AggregateReturn(vanilla.Rewards(), aggregation));
    out.momentum.returns.push_back(
        AggregateReturn(momentum.Rewards(), aggregation));
  }
  return out;
}

}  // namespace pairprobe
