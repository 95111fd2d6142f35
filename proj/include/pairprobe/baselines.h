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

#ifndef PAIRPROBE_BASELINES_H_
#define PAIRPROBE_BASELINES_H_

#include <span>
#include <string_view>
#include <vector>

#include "pairprobe/features.h"
#include "pairprobe/metrics.h"
#include "pairprobe/probe.h"

namespace pairprobe {

enum class BaselineKind {
  kLastToken,
  kMeanPooled,
  kMultiLayer,
  kAttentionLastLayer,
  kMultiAttn,
  kHiddenPlusAttn,
};

inline constexpr BaselineKind kAllBaselines[] = {
    BaselineKind::kLastToken,          BaselineKind::kMeanPooled,
    BaselineKind::kMultiLayer,         BaselineKind::kAttentionLastLayer,
    BaselineKind::kMultiAttn,          BaselineKind::kHiddenPlusAttn,
};

std::string_view BaselineName(BaselineKind kind);
BaselineKind ParseBaseline(std::string_view name);
bool IsHiddenStateBaseline(BaselineKind kind);

struct BaselineSpec {
  BaselineKind kind = BaselineKind::kLastToken;
  ProbeConfig probe;
};

// The input slice a baseline probes. Hidden+Attn is Last-Token followed by
// the last-layer attention statistics.
std::vector<double> BaselineFeatures(const FeatureRecord& record,
                                     BaselineKind kind);
int BaselineInputDim(const FeatureDims& dims, BaselineKind kind);

ProbeModel TrainBaseline(const BaselineSpec& spec,
                         std::span<const FeatureRecord> records);

std::vector<double> ScoreBaseline(const ProbeModel& model,
                                  const BaselineSpec& spec,
                                  std::span<const FeatureRecord> records);

struct BaselineEval {
  double auroc = 0.5;
  double ece = 0.0;
};

BaselineEval EvaluateBaseline(const ProbeModel& model,
                              const BaselineSpec& spec,
                              std::span<const FeatureRecord> records,
                              const EceConfig& ece = {});

}  // namespace pairprobe

#endif  // PAIRPROBE_BASELINES_H_
