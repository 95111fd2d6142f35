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
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "pairprobe/error.h"
#include "pairprobe/pair_model.h"
#include "pairprobe/probe.h"
#include "pairprobe/synth.h"

namespace pairprobe {
namespace {

ScoredSet Set(std::vector<double> s, std::vector<int> y) {
  return ScoredSet{std::move(s), std::move(y), std::nullopt};
}

// Random set with both classes; scores drawn from a small grid so ties occur.
ScoredSet RandomSet(std::mt19937_64& rng, bool coarse) {
  std::uniform_int_distribution<int> n_dist(2, 50), grid(0, 9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  const int n = n_dist(rng);
  ScoredSet set;
  for (int i = 0; i < n; ++i) {
    set.scores.push_back(coarse ? grid(rng) / 10.0 : u(rng));
    set.labels.push_back(coin(rng) ? 1 : 0);
  }
  set.labels[0] = 0;
  set.labels[1] = 1;
  return set;
}

TEST(Auroc, HandValues) {
  EXPECT_EQ(Auroc(Set({0.9, 0.2, 0.7}, {1, 0, 1})), 1.0);
  EXPECT_EQ(Auroc(Set({0.3, 0.3, 0.3, 0.3}, {1, 0, 0, 1})), 0.5);
  EXPECT_EQ(Auroc(Set({0.1, 0.9}, {1, 0})), 0.0);
  EXPECT_EQ(Auroc(Set({0.1, 0.5, 0.5, 0.9}, {0, 1, 0, 1})), 0.875);
}

TEST(Auroc, Errors) {
  try {
    Auroc(Set({0.1, 0.2}, {1, 1}));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.category(), ErrorCategory::kMissingClass);
  }
  EXPECT_THROW(Auroc(Set({0.1, 0.2}, {1})), Error);
  EXPECT_THROW(Auroc(Set({0.1, 0.2}, {1, 2})), Error);
}

TEST(Auroc, EqualsPairwiseOracle) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 400; ++trial) {
    const ScoredSet set = RandomSet(rng, trial % 2 == 0);
    EXPECT_EQ(Auroc(set), oracle::PairwiseAuroc(set.scores, set.labels));
  }
}

TEST(Auroc, LabelFlipAndMonotoneTransforms) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    ScoredSet set = RandomSet(rng, trial % 2 == 0);
    ScoredSet flipped = set;
    for (int& y : flipped.labels) y = 1 - y;
    EXPECT_NEAR(Auroc(set) + Auroc(flipped), 1.0, 1e-12);

    ScoredSet cubed = set, logit = set;
    for (double& s : cubed.scores) s = s * s * s;
    for (double& s : logit.scores) s = Logit(std::clamp(s, 1e-9, 1 - 1e-9));
    EXPECT_EQ(Auroc(set), Auroc(cubed));
    EXPECT_EQ(Auroc(set), Auroc(logit));
  }
}

TEST(Ece, HandValues) {
  EXPECT_EQ(ExpectedCalibrationError(Set({0.5, 0.5, 0.5, 0.5}, {1, 0, 1, 0})), 0.0);
  EXPECT_NEAR(ExpectedCalibrationError(Set({0.95, 0.95, 0.95, 0.95}, {1, 1, 1, 1})), 0.05,
              1e-15);
  EXPECT_EQ(ExpectedCalibrationError(Set({1.0}, {0})), 1.0);
  // Two bins, weights 1/2 each: |0.15 - 0| and |0.85 - 1|.
  EXPECT_NEAR(ExpectedCalibrationError(Set({0.15, 0.15, 0.85, 0.85}, {0, 0, 1, 1})), 0.15,
              1e-15);
  EXPECT_THROW(ExpectedCalibrationError(Set({}, {})), Error);
  EXPECT_THROW(ExpectedCalibrationError(Set({1.2}, {1})), Error);
  EXPECT_THROW(ExpectedCalibrationError(Set({0.2}, {1}), EceConfig{0}), Error);
}

TEST(Ece, Properties) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const ScoredSet set = RandomSet(rng, trial % 2 == 0);
    const double ece = ExpectedCalibrationError(set);
    EXPECT_GE(ece, 0.0);
    EXPECT_LE(ece, 1.0);
  }
  // Per-bin confidence equal to per-bin accuracy.
  ScoredSet calibrated;
  for (int i = 0; i < 4; ++i) {
    calibrated.scores.push_back(0.25);
    calibrated.labels.push_back(i == 0 ? 1 : 0);
    calibrated.scores.push_back(0.75);
    calibrated.labels.push_back(i == 0 ? 0 : 1);
  }
  EXPECT_EQ(ExpectedCalibrationError(calibrated), 0.0);
}

TEST(Accuracy, Threshold) {
  EXPECT_EQ(Accuracy(Set({0.9, 0.2, 0.5, 0.4}, {1, 0, 1, 1})), 0.75);
}

TEST(StratifiedAuroc, Buckets) {
  ScoredSet set = Set({0.9, 0.1, 0.8, 0.3}, {1, 0, 1, 0});
  set.strata = std::vector<std::optional<int>>{1, 1, 1, 1};
  const auto one = StratifiedAuroc(set, 4);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one.begin()->first.Name(), "1");

  set.strata = std::vector<std::optional<int>>{1, 1, 2, std::nullopt};
  const auto partial = StratifiedAuroc(set, 4);
  ASSERT_EQ(partial.size(), 1u);
  EXPECT_EQ(partial.begin()->first.lower, 1);

  set.strata = std::vector<std::optional<int>>{5, 9, 4, 2};
  const auto capped = StratifiedAuroc(set, 4);
  ASSERT_EQ(capped.size(), 1u);
  EXPECT_EQ(capped.begin()->first.Name(), "4+");
  EXPECT_EQ(capped.begin()->second, 1.0);

  EXPECT_THROW(StratifiedAuroc(Set({0.1, 0.2}, {0, 1}), 4), Error);
}

TEST(StratifiedAuroc, SyntheticCorpusBuckets) {
  SynthConfig cfg;
  const SynthCorpus corpus = GenerateCorpus(cfg);
  const auto& records = corpus.test_contaminated.records;
  ScoredSet set{{}, Labels(records), std::vector<std::optional<int>>{}};
  for (const FeatureRecord& r : records) {
    set.scores.push_back(r.last_token[0]);
    set.strata->push_back(r.distance);
  }
  const auto buckets = StratifiedAuroc(set, 4);
  std::vector<std::string> names;
  for (const auto& [b, v] : buckets) names.push_back(b.Name());
  EXPECT_EQ(names, (std::vector<std::string>{"1", "2", "3", "4+"}));
}

}  // namespace
}  // namespace pairprobe
