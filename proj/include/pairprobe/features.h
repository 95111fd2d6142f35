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

#ifndef PAIRPROBE_FEATURES_H_
#define PAIRPROBE_FEATURES_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pairprobe/trajectory.h"

namespace pairprobe {

// Number of final layers concatenated into the multi-layer hidden feature.
inline constexpr int kMultiLayerDepth = 4;

// Per-head attention statistics, in their canonical order.
enum class AttentionStat { kMaxAttn = 0, kStdAttn = 1, kPrefixRatio = 2, kSelfRatio = 3 };
inline constexpr int kNumAttentionStats = 4;
inline constexpr double kRowSumTolerance = 1e-5;

std::string_view AttentionStatName(AttentionStat stat);
AttentionStat ParseAttentionStat(std::string_view name);

struct AttentionStats {
  double max_attn = 0.0;
  double std_attn = 0.0;
  double prefix_ratio = 0.0;
  double self_ratio = 0.0;

  double Get(AttentionStat stat) const;
};

// Raw activations captured at the evaluation turn.
struct ActivationPayload {
  // [layer][d_model], ordered first layer to last layer.
  std::vector<std::vector<double>> hidden_last_token_per_layer;
  std::vector<double> hidden_mean_pooled_last_layer;
  // [layer][head][position]; each row is the evaluation turn's attention
  // distribution over prefix positions followed by evaluation-turn positions.
  std::vector<std::vector<std::vector<double>>> attention_rows;
  int prefix_token_count = 0;
  int eval_token_count = 0;
};

struct FeatureDims {
  int d_model = 0;
  int heads = 0;
  int layers = 0;

  int AttnLastLayerSize() const { return kNumAttentionStats * heads; }
  int AttnMultiLayerSize() const { return kNumAttentionStats * heads * layers; }
  int MultiLayerSize() const { return kMultiLayerDepth * d_model; }
  bool operator==(const FeatureDims&) const = default;
};

// One evaluation turn's features. Attention blocks are laid out
// statistic-major, then head, then layer:
//   attn_multi_layer[(stat * heads + head) * layers + layer]
//   attn_last_layer[stat * heads + head]
struct FeatureRecord {
  std::string record_id;
  FeatureDims dims;
  std::vector<double> last_token;
  std::vector<double> mean_pooled;
  std::vector<double> multi_layer;
  std::vector<double> attn_last_layer;
  std::vector<double> attn_multi_layer;
  Label label = Label::kIncorrect;
  PrefixKind prefix_kind = PrefixKind::kClean;
  std::optional<int> distance;
  std::optional<ContaminationType> contamination_type;
  // Optional grouping of turns into multi-step trajectories.
  std::optional<std::string> trajectory_id;

  bool operator==(const FeatureRecord&) const = default;
};

// Non-empty subset of the four statistics.
class FeatureSubsetMask {
 public:
  static FeatureSubsetMask All();
  // Throws kConfig on an empty list.
  static FeatureSubsetMask Of(std::initializer_list<AttentionStat> stats);
  static FeatureSubsetMask FromBits(unsigned bits);
  // Comma-separated statistic names, or "all".
  static FeatureSubsetMask Parse(std::string_view text);

  bool Includes(AttentionStat stat) const;
  int Count() const;
  unsigned bits() const { return bits_; }
  std::string ToString() const;
  bool operator==(const FeatureSubsetMask&) const = default;

 private:
  explicit FeatureSubsetMask(unsigned bits) : bits_(bits) {}
  unsigned bits_;
};

// Statistics of one attention row whose first `prefix_token_count` entries
// are prefix positions. std_attn is the population standard deviation.
AttentionStats ComputeAttentionStats(std::span<const double> row,
                                     int prefix_token_count);

// Throws kDimension / kDomain when the payload violates its invariants.
FeatureDims ValidatePayload(const ActivationPayload& payload);

FeatureRecord BuildFeatureRecord(const ActivationPayload& payload,
                                 std::string record_id, Label label,
                                 PrefixKind prefix_kind,
                                 std::optional<int> distance);

// attn_multi_layer with the excluded statistics' blocks removed.
std::vector<double> ApplySubset(const FeatureRecord& record,
                                const FeatureSubsetMask& mask);

// Same for the last-layer attention block.
std::vector<double> ApplySubsetLastLayer(const FeatureRecord& record,
                                         const FeatureSubsetMask& mask);

// Throws kDimension if the record's vectors disagree with its dims.
void CheckRecordDims(const FeatureRecord& record);

enum class HiddenVariant { kLastToken, kMeanPooled, kMultiLayer };
enum class AttentionVariant { kLastLayer, kMultiLayer };

std::string_view HiddenVariantName(HiddenVariant variant);
HiddenVariant ParseHiddenVariant(std::string_view name);
std::string_view AttentionVariantName(AttentionVariant variant);
AttentionVariant ParseAttentionVariant(std::string_view name);

std::span<const double> HiddenSlice(const FeatureRecord& record,
                                    HiddenVariant variant);
std::vector<double> AttentionSlice(const FeatureRecord& record,
                                   AttentionVariant variant,
                                   const FeatureSubsetMask& mask);
int AttentionSliceSize(const FeatureDims& dims, AttentionVariant variant,
                       const FeatureSubsetMask& mask);

}  // namespace pairprobe

#endif  // PAIRPROBE_FEATURES_H_
