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

#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "pairprobe/error.h"
#include "pairprobe/io.h"
#include "pairprobe/metrics.h"
#include "pairprobe/synth.h"

namespace pairprobe {
namespace {

const SynthCorpus& Corpus() {
  static const SynthCorpus corpus = GenerateCorpus(SynthConfig{});
  return corpus;
}

const PairModel& Trained() {
  static const PairModel model = TrainPair(Corpus().train.records);
  return model;
}

std::vector<FeatureRecord> AllRecords() {
  std::vector<FeatureRecord> all;
  for (const SynthSplit* s : {&Corpus().train, &Corpus().test_clean,
                              &Corpus().test_contaminated, &Corpus().test_diagnostic}) {
    all.insert(all.end(), s->records.begin(), s->records.end());
  }
  return all;
}

TEST(PairModel, Stage1IsFrozen) {
  const PairConfig config;
  const ProbeFit stage1 = FitStage1(Corpus().train.records, config);
  const PairModel& pair = Trained();
  EXPECT_EQ(ProbeToJson(stage1.model).dump(), ProbeToJson(pair.stage1).dump());
  EXPECT_EQ(Fnv1aHex(ProbeToJson(stage1.model).dump()),
            Fnv1aHex(ProbeToJson(pair.stage1).dump()));
  for (const FeatureRecord& r : AllRecords()) {
    const std::span<const double> h = HiddenSlice(r, config.stage1_variant);
    EXPECT_EQ(pair.ScoreBc(r), stage1.model.PredictProba(h));
  }
}

TEST(PairModel, DeterministicTraining) {
  const PairModel again = TrainPair(Corpus().train.records);
  ModelFile a{Corpus().train.records.front().dims, Trained(), std::nullopt, {}};
  ModelFile b{Corpus().train.records.front().dims, again, std::nullopt, {}};
  EXPECT_EQ(SerializeModel(a), SerializeModel(b));

  const SynthCorpus regenerated = GenerateCorpus(SynthConfig{});
  const PairModel fresh = TrainPair(regenerated.train.records);
  for (const FeatureRecord& r : regenerated.test_clean.records) {
    EXPECT_NEAR(fresh.ScoreBc(r), Trained().ScoreBc(r), 1e-12);
  }
}

TEST(PairModel, SingleClassTrainingSet) {
  std::vector<FeatureRecord> records = Corpus().train.records;
  for (FeatureRecord& r : records) r.label = Label::kCorrect;
  try {
    TrainPair(records);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kMissingClass);
    EXPECT_STREQ(e.what(), "single-class training set");
  }
}

TEST(PairModel, ZeroModels) {
  PairModel m = Trained();
  m.stage1.weights.setZero();
  m.stage1.bias = 0.0;
  for (const FeatureRecord& r : Corpus().test_clean.records) {
    EXPECT_EQ(m.ScoreBc(r), 0.5);
  }
  PairModel z = Trained();
  z.stage2.weights.setZero();
  z.stage2.bias = 0.0;
  for (const FeatureRecord& r : Corpus().test_diagnostic.records) {
    EXPECT_EQ(z.ScoreFinal(r), 0.5);
  }
}

TEST(PairModel, SingleActiveStage2Feature) {
  PairModel m = Trained();
  const double c = 1.7, b2 = -0.3;
  m.stage2.weights.setZero();
  m.stage2.weights[m.stage2.weights.size() - 1] = c;
  m.stage2.bias = b2;
  const Eigen::Index last = m.stage2.standardizer.size() - 1;
  for (const FeatureRecord& r : Corpus().test_contaminated.records) {
    const double s_bc = m.ScoreBc(r);
    const double z = (s_bc - m.stage2.standardizer.mean[last]) /
                     m.stage2.standardizer.scale[last];
    EXPECT_NEAR(m.ScoreFinal(r), oracle::Sigmoid(c * z + b2), 1e-14);
  }
}

TEST(PairModel, StageOneIgnoresAttention) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (FeatureRecord r : Corpus().test_clean.records) {
    const double before = Trained().ScoreBc(r);
    for (double& v : r.attn_multi_layer) v = u(rng);
    for (double& v : r.attn_last_layer) v = u(rng);
    EXPECT_EQ(Trained().ScoreBc(r), before);
  }
}

TEST(PairModel, ScoresAreBounded) {
  for (const FeatureRecord& r : AllRecords()) {
    const PairScores s = Trained().Score(r);
    EXPECT_GE(s.s_bc, 1e-12);
    EXPECT_LE(s.s_bc, 1 - 1e-12);
    EXPECT_GE(s.s_final, 1e-12);
    EXPECT_LE(s.s_final, 1 - 1e-12);
  }
  // Extreme inputs saturate at the clamp rather than 0 or 1.
  FeatureRecord r = Corpus().test_clean.records.front();
  for (double& v : r.last_token) v *= 1e6;
  const PairScores s = Trained().Score(r);
  EXPECT_GE(std::min(s.s_bc, 1 - s.s_bc), 1e-12);
}

TEST(PairModel, BatchMatchesSerial) {
  SynthConfig cfg;
  cfg.n_train = 10000;
  cfg.n_test = 0;
  const std::vector<FeatureRecord> records = GenerateCorpus(cfg).train.records;
  ASSERT_EQ(records.size(), 10000u);
  const std::vector<PairScores> batch = Trained().ScoreBatch(records);
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(batch[i], Trained().Score(records[i]));
  }
  EXPECT_TRUE(Trained().ScoreBatch({}).empty());

  std::vector<std::size_t> perm(200);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(4));
  std::vector<FeatureRecord> shuffled;
  for (std::size_t i : perm) shuffled.push_back(records[i]);
  const std::vector<PairScores> permuted = Trained().ScoreBatch(shuffled);
  for (std::size_t k = 0; k < perm.size(); ++k) EXPECT_EQ(permuted[k], batch[perm[k]]);
}

TEST(PairModel, AblationMasks) {
  const FeatureDims dims = Corpus().train.records.front().dims;
  PairConfig std_only;
  std_only.mask = FeatureSubsetMask::Of({AttentionStat::kStdAttn});
  const PairModel a = TrainPair(Corpus().train.records, std_only);
  EXPECT_EQ(a.stage2.input_dim(), dims.heads * dims.layers + 1);
  EXPECT_EQ(Trained().stage2.input_dim(), 4 * dims.heads * dims.layers + 1);

  // Same frozen Stage 1 under any mask.
  EXPECT_EQ(a.stage1.weights, Trained().stage1.weights);
}

TEST(PairModel, UnstandardizedStageOneColumn) {
  PairConfig raw;
  raw.standardize_sbc = false;
  const PairModel m = TrainPair(Corpus().train.records, raw);
  const Eigen::Index last = m.stage2.standardizer.size() - 1;
  EXPECT_EQ(m.stage2.standardizer.mean[last], 0.0);
  EXPECT_EQ(m.stage2.standardizer.scale[last], 1.0);
  EXPECT_EQ(m.stage2.standardizer.mean.head(last),
            Trained().stage2.standardizer.mean.head(last));
  EXPECT_TRUE(m.stage2_report.converged);
}

TEST(PairModel, Stage2InputLayout) {
  const FeatureRecord& r = Corpus().test_clean.records.front();
  const PairConfig config;
  const std::vector<double> row = Stage2Input(r, config, 0.25);
  ASSERT_EQ(row.size(), r.attn_multi_layer.size() + 1);
  EXPECT_TRUE(std::equal(r.attn_multi_layer.begin(), r.attn_multi_layer.end(), row.begin()));
  EXPECT_EQ(row.back(), 0.25);
}

TEST(PairModel, CorrectionBeatsStageOneOnDiagnosticSplit) {
  const auto& records = Corpus().test_diagnostic.records;
  ScoredSet pair{{}, Labels(records), std::nullopt};
  ScoredSet bc{{}, Labels(records), std::nullopt};
  for (const FeatureRecord& r : records) {
    pair.scores.push_back(Trained().ScoreFinal(r));
    bc.scores.push_back(Trained().ScoreBc(r));
  }
  EXPECT_GT(Auroc(pair), Auroc(bc));
}

TEST(PairModel, DimensionChecks) {
  std::vector<FeatureRecord> records = Corpus().train.records;
  records[5].last_token.pop_back();
  EXPECT_THROW(TrainPair(records), Error);
  EXPECT_THROW(CheckUniformDims({}), Error);

  FeatureRecord wrong = Corpus().test_clean.records.front();
  wrong.attn_multi_layer.pop_back();
  EXPECT_THROW(Trained().ScoreFinal(wrong), Error);
}

}  // namespace
}  // namespace pairprobe
