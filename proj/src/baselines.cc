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

#include "pairprobe/baselines.h"

#include <string>

#include "pairprobe/error.h"
#include "pairprobe/pair_model.h"

namespace pairprobe {

std::string_view BaselineName(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kLastToken:
      return "last_token";
    case BaselineKind::kMeanPooled:
      return "mean_pooled";
    case BaselineKind::kMultiLayer:
      return "multi_layer";
    case BaselineKind::kAttentionLastLayer:
      return "attention";
    case BaselineKind::kMultiAttn:
      return "multi_attn";
    case BaselineKind::kHiddenPlusAttn:
      return "hidden_plus_attn";
  }
  return "unknown";
}

BaselineKind ParseBaseline(std::string_view name) {
  for (BaselineKind kind : kAllBaselines) {
    if (BaselineName(kind) == name) return kind;
  }
  Fail(ErrorCategory::kConfig, "unknown baseline '" + std::string(name) + "'");
}

bool IsHiddenStateBaseline(BaselineKind kind) {
  return kind == BaselineKind::kLastToken ||
         kind == BaselineKind::kMeanPooled || kind == BaselineKind::kMultiLayer;
}

std::vector<double> BaselineFeatures(const FeatureRecord& record,
                                     BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kLastToken:
      return record.last_token;
    case BaselineKind::kMeanPooled:
      return record.mean_pooled;
    case BaselineKind::kMultiLayer:
      return record.multi_layer;
    case BaselineKind::kAttentionLastLayer:
      return record.attn_last_layer;
    case BaselineKind::kMultiAttn:
      return record.attn_multi_layer;
    case BaselineKind::kHiddenPlusAttn: {
      std::vector<double> out = record.last_token;
      out.insert(out.end(), record.attn_last_layer.begin(),
                 record.attn_last_layer.end());
      return out;
    }
  }
  return {};
}

int BaselineInputDim(const FeatureDims& dims, BaselineKind kind) {
  switch (kind) {
    case BaselineKind::kLastToken:
    case BaselineKind::kMeanPooled:
      return dims.d_model;
    case BaselineKind::kMultiLayer:
      return dims.MultiLayerSize();
    case BaselineKind::kAttentionLastLayer:
      return dims.AttnLastLayerSize();
    case BaselineKind::kMultiAttn:
      return dims.AttnMultiLayerSize();
    case BaselineKind::kHiddenPlusAttn:
      return dims.d_model + dims.AttnLastLayerSize();
  }
  return 0;
}

ProbeModel TrainBaseline(const BaselineSpec& spec,
                         std::span<const FeatureRecord> records) {
  CheckUniformDims(records);
  std::vector<std::vector<double>> rows;
  rows.reserve(records.size());
  for (const FeatureRecord& r : records) {
    rows.push_back(BaselineFeatures(r, spec.kind));
  }
  return FitProbe(RowsToMatrix(rows), Labels(records), spec.probe).model;
}

std::vector<double> ScoreBaseline(const ProbeModel& model,
                                  const BaselineSpec& spec,
                                  std::span<const FeatureRecord> records) {
  std::vector<double> scores;
  scores.reserve(records.size());
  for (const FeatureRecord& r : records) {
    const std::vector<double> x = BaselineFeatures(r, spec.kind);
    if (static_cast<Eigen::Index>(x.size()) != model.input_dim()) {
      Fail(ErrorCategory::kDimension,
           "baseline " + std::string(BaselineName(spec.kind)) + " expects " +
               std::to_string(model.input_dim()) + " features, record " +
               r.record_id + " provides " + std::to_string(x.size()));
    }
    scores.push_back(model.PredictProba(x));
  }
  return scores;
}

BaselineEval EvaluateBaseline(const ProbeModel& model,
                              const BaselineSpec& spec,
                              std::span<const FeatureRecord> records,
                              const EceConfig& ece) {
  ScoredSet set;
  set.scores = ScoreBaseline(model, spec, records);
  set.labels = Labels(records);
  BaselineEval out;
  out.auroc = Auroc(set);
  out.ece = ExpectedCalibrationError(set, ece);
  return out;
}

}  // namespace pairprobe
