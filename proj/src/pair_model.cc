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

#include "pairprobe/pair_model.h"

#include <string>

#include "pairprobe/error.h"

namespace pairprobe {
namespace {

void CheckStage1Input(const ProbeModel& stage1, std::span<const double> h) {
  if (static_cast<Eigen::Index>(h.size()) != stage1.input_dim()) {
    Fail(ErrorCategory::kDimension,
         "stage 1 expects " + std::to_string(stage1.input_dim()) +
             " hidden features, record has " + std::to_string(h.size()));
  }
}

}  // namespace

FeatureDims CheckUniformDims(std::span<const FeatureRecord> records) {
  if (records.empty()) Fail(ErrorCategory::kEmptyInput, "no records");
  const FeatureDims dims = records.front().dims;
  for (const FeatureRecord& r : records) {
    if (!(r.dims == dims)) {
      Fail(ErrorCategory::kDimension,
           "record " + r.record_id + " has dimensions differing from " +
               records.front().record_id);
    }
    CheckRecordDims(r);
  }
  return dims;
}

std::vector<int> Labels(std::span<const FeatureRecord> records) {
  std::vector<int> y;
  y.reserve(records.size());
  for (const FeatureRecord& r : records) y.push_back(LabelValue(r.label));
  return y;
}

std::vector<double> Stage2Input(const FeatureRecord& record,
                                const PairConfig& config, double s_bc) {
  std::vector<double> row =
      AttentionSlice(record, config.stage2_variant, config.mask);
  row.push_back(s_bc);
  return row;
}

ProbeFit FitStage1(std::span<const FeatureRecord> records,
                   const PairConfig& config) {
  CheckUniformDims(records);
  std::vector<std::vector<double>> rows;
  rows.reserve(records.size());
  for (const FeatureRecord& r : records) {
    const auto h = HiddenSlice(r, config.stage1_variant);
    rows.emplace_back(h.begin(), h.end());
  }
  return FitProbe(RowsToMatrix(rows), Labels(records), config.probe);
}

PairModel FitStage2(const ProbeFit& stage1,
                    std::span<const FeatureRecord> records,
                    const PairConfig& config) {
  CheckUniformDims(records);
  PairModel model;
  model.stage1 = stage1.model;
  model.stage1_report = stage1.report;
  model.config = config;

  std::vector<std::vector<double>> rows;
  rows.reserve(records.size());
  for (const FeatureRecord& r : records) {
    rows.push_back(Stage2Input(r, config, model.ScoreBc(r)));
  }
  const Eigen::MatrixXd x = RowsToMatrix(rows);
  Standardizer standardizer = FitStandardizer(x);
  if (!config.standardize_sbc) {
    const Eigen::Index last = x.cols() - 1;
    standardizer.mean(last) = 0.0;
    standardizer.scale(last) = 1.0;
  }
  ProbeFit fit =
      FitProbe(x, Labels(records), std::move(standardizer), config.probe);
  model.stage2 = std::move(fit.model);
  model.stage2_report = std::move(fit.report);
  return model;
}

PairModel TrainPair(std::span<const FeatureRecord> records,
                    const PairConfig& config) {
  const ProbeFit stage1 = FitStage1(records, config);
  return FitStage2(stage1, records, config);
}

double PairModel::ScoreBc(const FeatureRecord& record) const {
  const auto h = HiddenSlice(record, config.stage1_variant);
  CheckStage1Input(stage1, h);
  return stage1.PredictProba(h);
}

double PairModel::ScoreFinal(const FeatureRecord& record) const {
  return Score(record).s_final;
}

PairScores PairModel::Score(const FeatureRecord& record) const {
  PairScores scores;
  scores.s_bc = ScoreBc(record);
  const std::vector<double> row = Stage2Input(record, config, scores.s_bc);
  if (static_cast<Eigen::Index>(row.size()) != stage2.input_dim()) {
    Fail(ErrorCategory::kDimension,
         "stage 2 expects " + std::to_string(stage2.input_dim()) +
             " inputs, record provides " + std::to_string(row.size()));
  }
  scores.s_final = stage2.PredictProba(row);
  return scores;
}

std::vector<PairScores> PairModel::ScoreBatch(
    std::span<const FeatureRecord> records) const {
  std::vector<PairScores> out;
  out.reserve(records.size());
  for (const FeatureRecord& r : records) out.push_back(Score(r));
  return out;
}

}  // namespace pairprobe
