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

#include "pairprobe/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <random>
#include <string>

#include "pairprobe/error.h"

namespace pairprobe {
namespace {

// Stream identifiers mixed into every seed.
enum Stream : std::uint64_t {
  kDirection = 1,
  kEvalTurn = 2,
  kCleanPrefix = 3,
  kContaminatedPrefix = 4,
  kLatent = 5,
  kMetadata = 6,
};

enum SplitId : std::uint64_t {
  kTrain = 11,
  kTestPairs = 12,
  kDiagnostic = 13,
};

std::mt19937_64 MakeRng(std::initializer_list<std::uint64_t> keys) {
  std::vector<std::uint32_t> words;
  for (std::uint64_t k : keys) {
    words.push_back(static_cast<std::uint32_t>(k));
    words.push_back(static_cast<std::uint32_t>(k >> 32));
  }
  std::seed_seq seq(words.begin(), words.end());
  return std::mt19937_64(seq);
}

std::uint64_t PairSeed(std::uint64_t seed, SplitId split, int index) {
  auto rng = MakeRng({seed, split, static_cast<std::uint64_t>(index)});
  return rng();
}

std::vector<double> Gaussian(std::mt19937_64& rng, int n, double sd) {
  std::normal_distribution<double> normal(0.0, sd);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (double& v : out) v = normal(rng);
  return out;
}

// Noise belonging to the evaluation turn itself; shared by matched pairs.
struct EvalTurnDraw {
  std::vector<std::vector<double>> hidden;  // [layer][d_model]
  std::vector<double> pooled;               // [d_model]
  std::vector<std::vector<double>> lookback;             // [layer][head]
  std::vector<std::vector<std::vector<double>>> self;    // [layer][head][pos]
};

// Noise that depends on the prefix content.
struct PrefixDraw {
  std::vector<std::vector<std::vector<double>>> prefix;  // [layer][head][pos]
};

EvalTurnDraw DrawEvalTurn(const SynthConfig& c, std::uint64_t base_seed) {
  auto rng = MakeRng({base_seed, kEvalTurn});
  EvalTurnDraw d;
  for (int l = 0; l < c.layers; ++l) {
    d.hidden.push_back(Gaussian(rng, c.d_model, c.noise_std));
  }
  d.pooled = Gaussian(rng, c.d_model, c.noise_std);
  for (int l = 0; l < c.layers; ++l) {
    d.lookback.push_back(Gaussian(rng, c.heads, c.noise_std));
    std::vector<std::vector<double>> heads;
    for (int h = 0; h < c.heads; ++h) {
      heads.push_back(Gaussian(rng, c.eval_tokens, 0.5 * c.noise_std));
    }
    d.self.push_back(std::move(heads));
  }
  return d;
}

PrefixDraw DrawPrefix(const SynthConfig& c, std::uint64_t base_seed,
                      Stream stream) {
  auto rng = MakeRng({base_seed, stream});
  PrefixDraw d;
  for (int l = 0; l < c.layers; ++l) {
    std::vector<std::vector<double>> heads;
    for (int h = 0; h < c.heads; ++h) {
      heads.push_back(Gaussian(rng, c.prefix_tokens, 0.5 * c.noise_std));
    }
    d.prefix.push_back(std::move(heads));
  }
  return d;
}

std::vector<double> Direction(const SynthConfig& c) {
  auto rng = MakeRng({c.seed, kDirection});
  std::vector<double> u = Gaussian(rng, c.d_model, 1.0);
  double norm = 0.0;
  for (double v : u) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : u) v /= norm;
  return u;
}

std::vector<double> Softmax(std::vector<double> logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& v : logits) {
    v = std::exp(v - peak);
    sum += v;
  }
  for (double& v : logits) v /= sum;
  return logits;
}

ActivationPayload Render(const SynthConfig& c, const std::vector<double>& u,
                         const EvalTurnDraw& eval, const PrefixDraw& prefix,
                         Label correct, bool belief_consistent,
                         double attenuation) {
  ActivationPayload p;
  p.prefix_token_count = c.prefix_tokens;
  p.eval_token_count = c.eval_tokens;

  const double bc_sign = belief_consistent ? 1.0 : -1.0;
  for (int l = 0; l < c.layers; ++l) {
    const double gain = 0.5 + 0.5 * static_cast<double>(l + 1) / c.layers;
    std::vector<double> h = eval.hidden[l];
    for (int k = 0; k < c.d_model; ++k) {
      h[k] += bc_sign * c.mu_bc * attenuation * gain * u[k];
    }
    p.hidden_last_token_per_layer.push_back(std::move(h));
  }
  p.hidden_mean_pooled_last_layer = eval.pooled;
  for (int k = 0; k < c.d_model; ++k) {
    p.hidden_mean_pooled_last_layer[k] +=
        0.8 * bc_sign * c.mu_bc * attenuation * u[k];
  }

  // Correct turns reach further back into the prefix and peak on its first
  // (task-relevant) position.
  const double gc_sign = correct == Label::kCorrect ? 1.0 : -1.0;
  for (int l = 0; l < c.layers; ++l) {
    std::vector<std::vector<double>> layer;
    for (int h = 0; h < c.heads; ++h) {
      std::vector<double> logits;
      logits.reserve(static_cast<std::size_t>(c.prefix_tokens + c.eval_tokens));
      const double lookback = gc_sign * c.mu_gc + eval.lookback[l][h];
      for (int k = 0; k < c.prefix_tokens; ++k) {
        double v = prefix.prefix[l][h][k] + lookback;
        if (k == 0) v += gc_sign * c.mu_gc;
        logits.push_back(v);
      }
      for (int k = 0; k < c.eval_tokens; ++k) {
        logits.push_back(1.0 + eval.self[l][h][k]);
      }
      layer.push_back(Softmax(std::move(logits)));
    }
    p.attention_rows.push_back(std::move(layer));
  }
  return p;
}

Trajectory MakeTrajectory(const std::string& id, PrefixKind kind,
                          std::optional<int> distance,
                          std::optional<ContaminationType> type,
                          std::mt19937_64& rng) {
  std::uniform_int_distribution<int> extra(0, 2);
  const int eval_index = distance.value_or(1) + 1 + extra(rng);
  Trajectory t;
  t.task_id = id;
  t.prefix_kind = kind;
  constexpr StepRole kCycle[] = {StepRole::kThought, StepRole::kAction,
                                 StepRole::kObservation};
  for (int i = 1; i <= eval_index; ++i) {
    Step step;
    step.index = i;
    step.role = i == eval_index ? StepRole::kAction : kCycle[(i - 1) % 3];
    step.text_len_tokens = 16 + static_cast<int>(rng() % 48);
    step.is_evaluation_turn = i == eval_index;
    t.steps.push_back(step);
  }
  if (kind != PrefixKind::kClean) {
    ContaminationInfo info;
    info.distance = *distance;
    info.contaminated_index = eval_index - *distance;
    info.type = *type;
    t.contamination = info;
  }
  return t;
}

ContaminationType DrawType(std::mt19937_64& rng) {
  return static_cast<ContaminationType>(rng() % 4);
}

MatchedPair RenderPair(const SynthConfig& c, const std::vector<double>& u,
                       std::uint64_t base_seed, Label label, int distance,
                       bool contaminated_bc) {
  const EvalTurnDraw eval = DrawEvalTurn(c, base_seed);
  const PrefixDraw clean_prefix = DrawPrefix(c, base_seed, kCleanPrefix);
  const PrefixDraw dirty_prefix = DrawPrefix(c, base_seed, kContaminatedPrefix);
  const bool correct = label == Label::kCorrect;

  MatchedPair pair;
  pair.attenuation = HiddenAttenuation(c, distance);
  pair.clean_payload = Render(c, u, eval, clean_prefix, label, correct, 1.0);
  pair.contaminated_payload = Render(c, u, eval, dirty_prefix, label,
                                     contaminated_bc, pair.attenuation);
  pair.clean_latent = {label, correct, PrefixKind::kClean, std::nullopt};
  pair.contaminated_latent = {label, contaminated_bc, PrefixKind::kContaminated,
                              distance};
  return pair;
}

void Append(SynthSplit& split, FeatureRecord record, LatentState latent,
            std::optional<ContaminationType> type, std::mt19937_64& meta) {
  record.contamination_type = type;
  split.trajectories.push_back(MakeTrajectory(
      record.record_id, latent.prefix_kind, latent.distance, type, meta));
  split.records.push_back(std::move(record));
  split.latents.push_back(latent);
}

std::string RecordId(std::string_view prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%05d", index);
  return std::string(prefix) + "-" + buf;
}

}  // namespace

void SynthConfig::Validate() const {
  auto fraction = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (n_train < 2 || n_test < 0) {
    Fail(ErrorCategory::kConfig, "n_train must be >= 2 and n_test >= 0");
  }
  if (d_model < 1 || heads < 1 || layers < kMultiLayerDepth) {
    Fail(ErrorCategory::kConfig, "dimensions must be positive with layers >= 4");
  }
  if (!fraction(contamination_fraction) || !fraction(diagnostic_fraction) ||
      !fraction(decoupling_prob) || !fraction(attenuation_floor)) {
    Fail(ErrorCategory::kConfig, "fractions must lie in [0, 1]");
  }
  if (!(noise_std > 0.0) || max_distance < 1) {
    Fail(ErrorCategory::kConfig, "noise_std and max_distance must be positive");
  }
  if (!std::isfinite(mu_bc) || !std::isfinite(mu_gc)) {
    Fail(ErrorCategory::kConfig, "signal strengths must be finite");
  }
  if (prefix_tokens < 1 || eval_tokens < 1) {
    Fail(ErrorCategory::kConfig, "token counts must be positive");
  }
}

double HiddenAttenuation(const SynthConfig& config, int distance) {
  if (config.max_distance <= 1) return 1.0;
  const int d = std::clamp(distance, 1, config.max_distance);
  const double t = static_cast<double>(d - 1) / (config.max_distance - 1);
  return 1.0 - (1.0 - config.attenuation_floor) * t;
}

MatchedPair GenerateMatchedPair(const SynthConfig& config,
                                std::uint64_t base_seed,
                                std::optional<Label> label,
                                std::optional<int> distance) {
  config.Validate();
  auto latent_rng = MakeRng({base_seed, kLatent});
  const Label y = label.value_or(latent_rng() % 2 == 0 ? Label::kIncorrect
                                                        : Label::kCorrect);
  const int d = distance.value_or(
      1 + static_cast<int>(latent_rng() %
                           static_cast<std::uint64_t>(config.max_distance)));
  std::bernoulli_distribution decouple(config.decoupling_prob);
  const bool correct = y == Label::kCorrect;
  const bool contaminated_bc = decouple(latent_rng) ? !correct : correct;

  MatchedPair pair =
      RenderPair(config, Direction(config), base_seed, y, d, contaminated_bc);
  const std::string id = "pair-" + std::to_string(base_seed);
  pair.clean = BuildFeatureRecord(pair.clean_payload, id + "-clean", y,
                                  PrefixKind::kClean, std::nullopt);
  pair.contaminated =
      BuildFeatureRecord(pair.contaminated_payload, id + "-contaminated", y,
                         PrefixKind::kContaminated, d);
  return pair;
}

SynthCorpus GenerateCorpus(const SynthConfig& config) {
  config.Validate();
  SynthCorpus corpus;
  auto meta = MakeRng({config.seed, kMetadata});
  auto distance_of = [&](int i) { return (i / 2) % config.max_distance + 1; };

  const int n_contaminated = static_cast<int>(
      std::lround(config.contamination_fraction * config.n_train));
  const int n_clean = config.n_train - n_contaminated;
  for (int i = 0; i < config.n_train; ++i) {
    const bool contaminated = i >= n_clean;
    const int k = contaminated ? i - n_clean : i;
    const Label y = k % 2 == 1 ? Label::kCorrect : Label::kIncorrect;
    MatchedPair pair =
        GenerateMatchedPair(config, PairSeed(config.seed, kTrain, i), y,
                            distance_of(k));
    const std::string id = RecordId("train", i);
    if (contaminated) {
      pair.contaminated.record_id = id;
      Append(corpus.train, std::move(pair.contaminated),
             pair.contaminated_latent, DrawType(meta), meta);
    } else {
      pair.clean.record_id = id;
      Append(corpus.train, std::move(pair.clean), pair.clean_latent,
             std::nullopt, meta);
    }
  }

  for (int i = 0; i < config.n_test; ++i) {
    const Label y = i % 2 == 1 ? Label::kCorrect : Label::kIncorrect;
    MatchedPair pair = GenerateMatchedPair(
        config, PairSeed(config.seed, kTestPairs, i), y, distance_of(i));
    pair.clean.record_id = RecordId("clean", i);
    pair.contaminated.record_id = RecordId("contaminated", i);
    Append(corpus.test_clean, std::move(pair.clean), pair.clean_latent,
           std::nullopt, meta);
    Append(corpus.test_contaminated, std::move(pair.contaminated),
           pair.contaminated_latent, DrawType(meta), meta);
  }

  const std::vector<double> u = Direction(config);
  const int n_diagnostic = static_cast<int>(
      std::lround(config.diagnostic_fraction * config.n_test));
  for (int i = 0; i < n_diagnostic; ++i) {
    // Even: consistent with the prefix but wrong; odd: a correct repair turn
    // that contradicts the prefix.
    const bool repair = i % 2 == 1;
    const Label y = repair ? Label::kCorrect : Label::kIncorrect;
    const PrefixKind kind = repair
                                ? PrefixKind::kDiagnosticInconsistentCorrect
                                : PrefixKind::kDiagnosticConsistentIncorrect;
    const int d = distance_of(i);
    MatchedPair pair = RenderPair(config, u,
                                  PairSeed(config.seed, kDiagnostic, i), y, d,
                                  /*contaminated_bc=*/!repair);
    FeatureRecord record = BuildFeatureRecord(
        pair.contaminated_payload, RecordId("diagnostic", i), y, kind, d);
    const LatentState latent{y, !repair, kind, d};
    Append(corpus.test_diagnostic, std::move(record), latent, DrawType(meta),
           meta);
  }
  return corpus;
}

}  // namespace pairprobe
