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

#include <algorithm>

#include <gtest/gtest.h>

#include "pairprobe/error.h"
#include "pairprobe/pair_model.h"
#include "pairprobe/synth.h"

namespace pairprobe {
namespace {

const SynthCorpus& Corpus() {
  static const SynthCorpus corpus = GenerateCorpus(SynthConfig{});
  return corpus;
}

std::vector<FeatureRecord> CleanTrain() {
  std::vector<FeatureRecord> out;
  for (const FeatureRecord& r : Corpus().train.records) {
    if (r.prefix_kind == PrefixKind::kClean) out.push_back(r);
  }
  return out;
}

TEST(Baselines, InputDimensions) {
  const FeatureDims dims{16, 4, 4};
  EXPECT_EQ(BaselineInputDim(dims, BaselineKind::kHiddenPlusAttn), 32);
  EXPECT_EQ(BaselineInputDim(dims, BaselineKind::kLastToken), 16);
  EXPECT_EQ(BaselineInputDim(dims, BaselineKind::kMultiLayer), 64);
  EXPECT_EQ(BaselineInputDim(dims, BaselineKind::kMultiAttn), 64);
  for (BaselineKind k : kAllBaselines) {
    EXPECT_EQ(static_cast<int>(BaselineFeatures(Corpus().test_clean.records[0], k).size()),
              BaselineInputDim(dims, k));
    EXPECT_EQ(ParseBaseline(BaselineName(k)), k);
  }
  EXPECT_THROW(ParseBaseline("tree"), Error);
}

TEST(Baselines, SlicesMatchTheFeatureModule) {
  const FeatureRecord& r = Corpus().test_contaminated.records[3];
  auto same = [](std::span<const double> a, const std::vector<double>& b) {
    return std::equal(a.begin(), a.end(), b.begin(), b.end());
  };
  EXPECT_TRUE(same(r.last_token, BaselineFeatures(r, BaselineKind::kLastToken)));
  EXPECT_TRUE(same(r.mean_pooled, BaselineFeatures(r, BaselineKind::kMeanPooled)));
  EXPECT_TRUE(same(r.multi_layer, BaselineFeatures(r, BaselineKind::kMultiLayer)));
  EXPECT_TRUE(same(r.attn_last_layer, BaselineFeatures(r, BaselineKind::kAttentionLastLayer)));
  EXPECT_TRUE(same(r.attn_multi_layer, BaselineFeatures(r, BaselineKind::kMultiAttn)));
  std::vector<double> concat = r.last_token;
  concat.insert(concat.end(), r.attn_last_layer.begin(), r.attn_last_layer.end());
  EXPECT_EQ(concat, BaselineFeatures(r, BaselineKind::kHiddenPlusAttn));
}

TEST(Baselines, HiddenPlusAttnIgnoresStorageOrder) {
  const BaselineSpec spec{BaselineKind::kHiddenPlusAttn, {}};
  const ProbeModel m = TrainBaseline(spec, Corpus().train.records);
  for (const FeatureRecord& r : Corpus().test_clean.records) {
    // A record built with its blocks assigned in the opposite order.
    FeatureRecord copy;
    copy.attn_multi_layer = r.attn_multi_layer;
    copy.attn_last_layer = r.attn_last_layer;
    copy.multi_layer = r.multi_layer;
    copy.mean_pooled = r.mean_pooled;
    copy.last_token = r.last_token;
    copy.dims = r.dims;
    EXPECT_EQ(ScoreBaseline(m, spec, std::vector<FeatureRecord>{copy}),
              ScoreBaseline(m, spec, std::vector<FeatureRecord>{r}));
  }
}

TEST(Baselines, DeterministicTraining) {
  for (BaselineKind k : kAllBaselines) {
    const BaselineSpec spec{k, {}};
    const ProbeModel a = TrainBaseline(spec, Corpus().train.records);
    const ProbeModel b = TrainBaseline(spec, Corpus().train.records);
    EXPECT_EQ(a.weights, b.weights);
    EXPECT_EQ(a.bias, b.bias);
    EXPECT_EQ(a.standardizer.mean, b.standardizer.mean);
  }
}

TEST(Baselines, NullSignalCorpus) {
  SynthConfig cfg;
  cfg.mu_bc = 0.0;
  cfg.mu_gc = 0.0;
  cfg.n_test = 2000;
  const SynthCorpus c = GenerateCorpus(cfg);
  for (BaselineKind k : kAllBaselines) {
    const BaselineSpec spec{k, {}};
    const ProbeModel m = TrainBaseline(spec, c.train.records);
    for (const SynthSplit* s : {&c.test_clean, &c.test_contaminated}) {
      EXPECT_NEAR(EvaluateBaseline(m, spec, s->records).auroc, 0.5, 0.05) << BaselineName(k);
    }
  }
}

TEST(Baselines, DiagnosticAndCleanOrdering) {
  const std::vector<FeatureRecord> train = CleanTrain();
  const BaselineSpec attn{BaselineKind::kAttentionLastLayer, {}};
  const ProbeModel attn_model = TrainBaseline(attn, train);
  const double attn_clean = EvaluateBaseline(attn_model, attn, Corpus().test_clean.records).auroc;
  EXPECT_GE(EvaluateBaseline(attn_model, attn, Corpus().test_diagnostic.records).auroc, 0.70);
  for (BaselineKind k : kAllBaselines) {
    if (!IsHiddenStateBaseline(k)) continue;
    const BaselineSpec spec{k, {}};
    const ProbeModel m = TrainBaseline(spec, train);
    EXPECT_LE(EvaluateBaseline(m, spec, Corpus().test_diagnostic.records).auroc, 0.55)
        << BaselineName(k);
    EXPECT_GE(EvaluateBaseline(m, spec, Corpus().test_clean.records).auroc, attn_clean)
        << BaselineName(k);
  }
}

TEST(Baselines, EvaluationReportsCalibration) {
  const BaselineSpec spec{BaselineKind::kLastToken, {}};
  const ProbeModel m = TrainBaseline(spec, Corpus().train.records);
  const BaselineEval e = EvaluateBaseline(m, spec, Corpus().test_clean.records);
  EXPECT_GT(e.auroc, 0.5);
  EXPECT_GE(e.ece, 0.0);
  EXPECT_LE(e.ece, 1.0);
  EXPECT_TRUE(IsHiddenStateBaseline(BaselineKind::kMeanPooled));
  EXPECT_FALSE(IsHiddenStateBaseline(BaselineKind::kHiddenPlusAttn));
  EXPECT_FALSE(IsHiddenStateBaseline(BaselineKind::kMultiAttn));
}

}  // namespace
}  // namespace pairprobe
