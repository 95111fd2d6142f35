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

#ifndef PAIRPROBE_SYNTH_H_
#define PAIRPROBE_SYNTH_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "pairprobe/features.h"
#include "pairprobe/trajectory.h"

namespace pairprobe {

// Desk-scale stand-in for clean, contaminated and diagnostic agent turns.
//
// Each turn has two latent bits: grounded correctness (the label) and
// belief-consistency with its prefix. Hidden-state features carry the
// belief-consistency bit, attenuated linearly with contamination distance;
// attention rows carry the correctness bit as extra lookback mass into the
// prefix. Under clean prefixes the two bits agree. Contaminated turns
// disagree with probability `decoupling_prob`; diagnostic turns always
// disagree.
struct SynthConfig {
  std::uint64_t seed = 42;
  int n_train = 800;
  // Records in each of test_clean / test_contaminated.
  int n_test = 200;
  int d_model = 16;
  int heads = 4;
  int layers = 4;
  double contamination_fraction = 0.5;
  // Diagnostic split size as a fraction of n_test.
  double diagnostic_fraction = 1.0;
  double mu_bc = 1.2;
  double mu_gc = 0.3;
  double noise_std = 1.0;
  int max_distance = 4;
  // Hidden-signal multiplier at d = max_distance (1.0 at d = 1).
  double attenuation_floor = 0.1;
  double decoupling_prob = 0.3;
  int prefix_tokens = 24;
  int eval_tokens = 8;

  // Throws kConfig on out-of-range fields.
  void Validate() const;
};

struct LatentState {
  Label turn_correct = Label::kIncorrect;
  bool belief_consistent = false;
  PrefixKind prefix_kind = PrefixKind::kClean;
  std::optional<int> distance;
  bool operator==(const LatentState&) const = default;
};

struct SynthSplit {
  std::vector<FeatureRecord> records;
  std::vector<LatentState> latents;
  std::vector<Trajectory> trajectories;
};

struct SynthCorpus {
  SynthSplit train;
  SynthSplit test_clean;
  SynthSplit test_contaminated;
  SynthSplit test_diagnostic;
};

SynthCorpus GenerateCorpus(const SynthConfig& config);

// Linear schedule from 1.0 at d = 1 to attenuation_floor at max_distance.
double HiddenAttenuation(const SynthConfig& config, int distance);

struct MatchedPair {
  FeatureRecord clean;
  FeatureRecord contaminated;
  LatentState clean_latent;
  LatentState contaminated_latent;
  ActivationPayload clean_payload;
  ActivationPayload contaminated_payload;
  double attenuation = 1.0;
};

// One evaluation turn rendered under a clean and a contaminated prefix. Both
// share the label and every evaluation-turn noise draw. `label` and
// `distance` default to draws from `base_seed`.
MatchedPair GenerateMatchedPair(const SynthConfig& config,
                                std::uint64_t base_seed,
                                std::optional<Label> label = std::nullopt,
                                std::optional<int> distance = std::nullopt);

}  // namespace pairprobe

#endif  // PAIRPROBE_SYNTH_H_
