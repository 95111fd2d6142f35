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

#include "pairprobe/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "pairprobe/error.h"

namespace pairprobe {

void ScoredSet::Validate() const {
  if (scores.size() != labels.size()) {
    Fail(ErrorCategory::kDimension, "scores and labels differ in length");
  }
  if (strata.has_value() && strata->size() != scores.size()) {
    Fail(ErrorCategory::kDimension, "strata and scores differ in length");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) Fail(ErrorCategory::kDomain, "labels must be 0/1");
  }
}

double Auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    Fail(ErrorCategory::kDimension, "scores and labels differ in length");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Twice the Mann-Whitney U statistic, kept in integers so the result is
  // bit-identical to a pairwise count.
  std::uint64_t twice_u = 0;
  std::uint64_t negatives_below = 0;
  std::uint64_t positives = 0;
  std::uint64_t negatives = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    std::uint64_t group_pos = 0;
    std::uint64_t group_neg = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      const int y = labels[order[j]];
      if (y != 0 && y != 1) Fail(ErrorCategory::kDomain, "labels must be 0/1");
      (y == 1 ? group_pos : group_neg) += 1;
      ++j;
    }
    twice_u += 2 * group_pos * negatives_below + group_pos * group_neg;
    negatives_below += group_neg;
    positives += group_pos;
    negatives += group_neg;
    i = j;
  }
  if (positives == 0 || negatives == 0) {
    Fail(ErrorCategory::kMissingClass, "AUROC needs both classes");
  }
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(positives) * static_cast<double>(negatives));
}

double Auroc(const ScoredSet& set) {
  set.Validate();
  return Auroc(set.scores, set.labels);
}

double ExpectedCalibrationError(const ScoredSet& set, const EceConfig& config) {
  set.Validate();
  if (set.scores.empty()) Fail(ErrorCategory::kEmptyInput, "empty scored set");
  if (config.bins < 1) Fail(ErrorCategory::kConfig, "ECE needs >= 1 bin");
  const auto bins = static_cast<std::size_t>(config.bins);
  std::vector<double> confidence(bins, 0.0);
  std::vector<double> correct(bins, 0.0);
  std::vector<std::size_t> count(bins, 0);
  for (std::size_t i = 0; i < set.scores.size(); ++i) {
    const double s = set.scores[i];
    if (!(s >= 0.0 && s <= 1.0)) {
      Fail(ErrorCategory::kDomain, "scores must lie in [0, 1]");
    }
    const auto b = std::min(
        static_cast<std::size_t>(std::floor(s * static_cast<double>(bins))),
        bins - 1);
    confidence[b] += s;
    correct[b] += set.labels[i];
    ++count[b];
  }
  double ece = 0.0;
  const auto n = static_cast<double>(set.scores.size());
  for (std::size_t b = 0; b < bins; ++b) {
    if (count[b] == 0) continue;
    const auto nb = static_cast<double>(count[b]);
    ece += (nb / n) * std::abs(correct[b] / nb - confidence[b] / nb);
  }
  return ece;
}

double Accuracy(const ScoredSet& set, double threshold) {
  set.Validate();
  if (set.scores.empty()) Fail(ErrorCategory::kEmptyInput, "empty scored set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < set.scores.size(); ++i) {
    const int predicted = set.scores[i] >= threshold ? 1 : 0;
    hits += predicted == set.labels[i] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(set.scores.size());
}

std::string DistanceBucket::Name() const {
  return std::to_string(lower) + (open_ended ? "+" : "");
}

std::map<DistanceBucket, double> StratifiedAuroc(const ScoredSet& set,
                                                 int cap) {
  set.Validate();
  if (!set.strata.has_value()) {
    Fail(ErrorCategory::kConfig, "stratified AUROC needs distance strata");
  }
  if (cap < 1) Fail(ErrorCategory::kConfig, "distance cap must be >= 1");

  std::map<DistanceBucket, ScoredSet> buckets;
  for (std::size_t i = 0; i < set.scores.size(); ++i) {
    const std::optional<int>& d = (*set.strata)[i];
    if (!d.has_value()) continue;
    const DistanceBucket key{std::min(*d, cap), *d >= cap};
    ScoredSet& bucket = buckets[key];
    bucket.scores.push_back(set.scores[i]);
    bucket.labels.push_back(set.labels[i]);
  }

  std::map<DistanceBucket, double> out;
  for (const auto& [key, bucket] : buckets) {
    const bool has_pos =
        std::find(bucket.labels.begin(), bucket.labels.end(), 1) !=
        bucket.labels.end();
    const bool has_neg =
        std::find(bucket.labels.begin(), bucket.labels.end(), 0) !=
        bucket.labels.end();
    if (has_pos && has_neg) out[key] = Auroc(bucket);
  }
  return out;
}

}  // namespace pairprobe
