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

#ifndef PAIRPROBE_PAIR_MODEL_H_
#define PAIRPROBE_PAIR_MODEL_H_

#include <span>
#include <utility>
#include <vector>

#include "pairprobe/features.h"
#include "pairprobe/probe.h"

namespace pairprobe {

struct PairConfig {
  HiddenVariant stage1_variant = HiddenVariant::kLastToken;
  AttentionVariant stage2_variant = AttentionVariant::kMultiLayer;
  FeatureSubsetMask mask = FeatureSubsetMask::All();
  // When false the s_bc column bypasses standardization (mean 0, scale 1).
  bool standardize_sbc = true;
  ProbeConfig probe;
};

struct PairScores {
  double s_bc = 0.5;
  double s_final = 0.5;
  bool operator==(const PairScores&) const = default;
};

// Two-stage scorer: a frozen belief-consistency probe over hidden features
// and a correction probe over [attention features; s_bc].
struct PairModel {
  ProbeModel stage1;
  ProbeModel stage2;
  PairConfig config;
  FitReport stage1_report;
  FitReport stage2_report;

  double ScoreBc(const FeatureRecord& record) const;
  double ScoreFinal(const FeatureRecord& record) const;
  PairScores Score(const FeatureRecord& record) const;
  std::vector<PairScores> ScoreBatch(
      std::span<const FeatureRecord> records) const;
};

// Stage 1 alone, on the configured hidden variant.
ProbeFit FitStage1(std::span<const FeatureRecord> records,
                   const PairConfig& config);

// Fits Stage 2 against a frozen Stage 1. `stage1` is copied into the result
// unchanged.
PairModel FitStage2(const ProbeFit& stage1,
                    std::span<const FeatureRecord> records,
                    const PairConfig& config);

PairModel TrainPair(std::span<const FeatureRecord> records,
                    const PairConfig& config = {});

// Stage-2 input row: masked attention features followed by s_bc.
std::vector<double> Stage2Input(const FeatureRecord& record,
                                const PairConfig& config, double s_bc);

// Throws kDimension unless every record shares the first record's dims, and
// kEmptyInput when there are none.
FeatureDims CheckUniformDims(std::span<const FeatureRecord> records);

std::vector<int> Labels(std::span<const FeatureRecord> records);

}  // namespace pairprobe

#endif  // PAIRPROBE_PAIR_MODEL_H_
