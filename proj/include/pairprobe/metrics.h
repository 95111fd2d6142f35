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

#ifndef PAIRPROBE_METRICS_H_
#define PAIRPROBE_METRICS_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pairprobe {

struct ScoredSet {
  std::vector<double> scores;
  std::vector<int> labels;
  // Contamination distance per record; records without one are skipped by
  // stratified evaluation.
  std::optional<std::vector<std::optional<int>>> strata;

  // Throws kDimension on length mismatch and kDomain on non-binary labels.
  void Validate() const;
};

struct EceConfig {
  int bins = 10;
};

// Probability that a random positive outranks a random negative, ties
// counting one half. O(n log n); exactly equal to the pairwise definition.
double Auroc(std::span<const double> scores, std::span<const int> labels);
double Auroc(const ScoredSet& set);

// Equal-width bins over [0, 1]; a score of exactly 1 falls in the last bin.
double ExpectedCalibrationError(const ScoredSet& set,
                                const EceConfig& config = {});

// Fraction of records where (score >= threshold) matches the label.
double Accuracy(const ScoredSet& set, double threshold = 0.5);

struct DistanceBucket {
  int lower = 1;
  bool open_ended = false;  // "cap+" bucket.

  std::string Name() const;
  auto operator<=>(const DistanceBucket&) const = default;
};

// AUROC per distance bucket {1, ..., cap-1, cap+}. Buckets without both
// classes are omitted. Throws kConfig when the set carries no strata.
std::map<DistanceBucket, double> StratifiedAuroc(const ScoredSet& set,
                                                 int cap = 7);

}  // namespace pairprobe

#endif  // PAIRPROBE_METRICS_H_
