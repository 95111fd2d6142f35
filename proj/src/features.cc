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

#include "pairprobe/features.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "pairprobe/error.h"

namespace pairprobe {
namespace {

constexpr std::array<AttentionStat, kNumAttentionStats> kAllStats = {
    AttentionStat::kMaxAttn, AttentionStat::kStdAttn,
    AttentionStat::kPrefixRatio, AttentionStat::kSelfRatio};

std::string Trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t");
  if (first == std::string_view::npos) return "";
  const auto last = text.find_last_not_of(" \t");
  return std::string(text.substr(first, last - first + 1));
}

void CheckLength(const std::vector<double>& v, int expected,
                 std::string_view what) {
  if (static_cast<int>(v.size()) != expected) {
    Fail(ErrorCategory::kDimension,
         std::string(what) + " has length " + std::to_string(v.size()) +
             ", expected " + std::to_string(expected));
  }
}

std::vector<double> SelectBlocks(const std::vector<double>& source,
                                 int block_size,
                                 const FeatureSubsetMask& mask) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(mask.Count() * block_size));
  for (AttentionStat stat : kAllStats) {
    if (!mask.Includes(stat)) continue;
    const auto begin = source.begin() + static_cast<int>(stat) * block_size;
    out.insert(out.end(), begin, begin + block_size);
  }
  return out;
}

}  // namespace

std::string_view AttentionStatName(AttentionStat stat) {
  switch (stat) {
    case AttentionStat::kMaxAttn:
      return "max_attn";
    case AttentionStat::kStdAttn:
      return "std_attn";
    case AttentionStat::kPrefixRatio:
      return "prefix_ratio";
    case AttentionStat::kSelfRatio:
      return "self_ratio";
  }
  return "unknown";
}

AttentionStat ParseAttentionStat(std::string_view name) {
  for (AttentionStat stat : kAllStats) {
    if (AttentionStatName(stat) == name) return stat;
  }
  Fail(ErrorCategory::kConfig,
       "unknown attention statistic '" + std::string(name) + "'");
}

double AttentionStats::Get(AttentionStat stat) const {
  switch (stat) {
    case AttentionStat::kMaxAttn:
      return max_attn;
    case AttentionStat::kStdAttn:
      return std_attn;
    case AttentionStat::kPrefixRatio:
      return prefix_ratio;
    case AttentionStat::kSelfRatio:
      return self_ratio;
  }
  return 0.0;
}

FeatureSubsetMask FeatureSubsetMask::All() { return FeatureSubsetMask(0xFu); }

FeatureSubsetMask FeatureSubsetMask::Of(
    std::initializer_list<AttentionStat> stats) {
  unsigned bits = 0;
  for (AttentionStat stat : stats) bits |= 1u << static_cast<int>(stat);
  return FromBits(bits);
}

FeatureSubsetMask FeatureSubsetMask::FromBits(unsigned bits) {
  if ((bits & 0xFu) == 0 || (bits & ~0xFu) != 0) {
    Fail(ErrorCategory::kConfig, "feature subset mask must be non-empty");
  }
  return FeatureSubsetMask(bits);
}

FeatureSubsetMask FeatureSubsetMask::Parse(std::string_view text) {
  if (Trim(text) == "all") return All();
  unsigned bits = 0;
  std::stringstream stream{std::string(text)};
  std::string item;
  while (std::getline(stream, item, ',')) {
    const std::string name = Trim(item);
    if (name.empty()) continue;
    bits |= 1u << static_cast<int>(ParseAttentionStat(name));
  }
  return FromBits(bits);
}

bool FeatureSubsetMask::Includes(AttentionStat stat) const {
  return (bits_ >> static_cast<int>(stat)) & 1u;
}

int FeatureSubsetMask::Count() const {
  int count = 0;
  for (AttentionStat stat : kAllStats) count += Includes(stat) ? 1 : 0;
  return count;
}

std::string FeatureSubsetMask::ToString() const {
  std::string out;
  for (AttentionStat stat : kAllStats) {
    if (!Includes(stat)) continue;
    if (!out.empty()) out += ",";
    out += AttentionStatName(stat);
  }
  return out;
}

namespace {

// Sum of a row after checking it is a distribution.
double CheckedRowSum(std::span<const double> row) {
  double sum = 0.0;
  for (double v : row) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      Fail(ErrorCategory::kDomain, "attention row has a negative entry");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kRowSumTolerance) {
    Fail(ErrorCategory::kDomain,
         "attention row sums to " + std::to_string(sum) + ", expected 1");
  }
  return sum;
}

}  // namespace

AttentionStats ComputeAttentionStats(std::span<const double> row,
                                     int prefix_token_count) {
  const auto n = static_cast<int>(row.size());
  if (prefix_token_count < 0 || prefix_token_count >= n) {
    Fail(ErrorCategory::kDimension,
         "prefix token count " + std::to_string(prefix_token_count) +
             " out of range for row of length " + std::to_string(n));
  }
  const double sum = CheckedRowSum(row);

  AttentionStats stats;
  stats.max_attn = *std::max_element(row.begin(), row.end());
  const double mean = sum / n;
  double sq = 0.0;
  for (double v : row) sq += (v - mean) * (v - mean);
  stats.std_attn = std::sqrt(sq / n);
  stats.prefix_ratio =
      std::accumulate(row.begin(), row.begin() + prefix_token_count, 0.0);
  stats.self_ratio =
      std::accumulate(row.begin() + prefix_token_count, row.end(), 0.0);
  return stats;
}

FeatureDims ValidatePayload(const ActivationPayload& payload) {
  FeatureDims dims;
  dims.layers = static_cast<int>(payload.hidden_last_token_per_layer.size());
  if (dims.layers < kMultiLayerDepth) {
    Fail(ErrorCategory::kDimension,
         "multi-layer hidden feature needs at least " +
             std::to_string(kMultiLayerDepth) + " layers, got " +
             std::to_string(dims.layers));
  }
  dims.d_model =
      static_cast<int>(payload.hidden_last_token_per_layer.front().size());
  if (dims.d_model < 1) Fail(ErrorCategory::kDimension, "d_model is zero");
  for (const auto& h : payload.hidden_last_token_per_layer) {
    CheckLength(h, dims.d_model, "hidden layer vector");
  }
  CheckLength(payload.hidden_mean_pooled_last_layer, dims.d_model,
              "mean-pooled hidden vector");

  if (static_cast<int>(payload.attention_rows.size()) != dims.layers) {
    Fail(ErrorCategory::kDimension,
         "attention rows cover " +
             std::to_string(payload.attention_rows.size()) +
             " layers, hidden states cover " + std::to_string(dims.layers));
  }
  dims.heads = static_cast<int>(payload.attention_rows.front().size());
  if (dims.heads < 1) Fail(ErrorCategory::kDimension, "no attention heads");
  if (payload.eval_token_count < 1 || payload.prefix_token_count < 0) {
    Fail(ErrorCategory::kDimension, "invalid token counts");
  }
  const int row_len = payload.prefix_token_count + payload.eval_token_count;
  for (const auto& layer : payload.attention_rows) {
    if (static_cast<int>(layer.size()) != dims.heads) {
      Fail(ErrorCategory::kDimension, "inconsistent head count across layers");
    }
    for (const auto& row : layer) {
      CheckLength(row, row_len, "attention row");
      CheckedRowSum(row);
    }
  }
  return dims;
}

FeatureRecord BuildFeatureRecord(const ActivationPayload& payload,
                                 std::string record_id, Label label,
                                 PrefixKind prefix_kind,
                                 std::optional<int> distance) {
  const FeatureDims dims = ValidatePayload(payload);
  FeatureRecord record;
  record.record_id = std::move(record_id);
  record.dims = dims;
  record.label = label;
  record.prefix_kind = prefix_kind;
  record.distance = distance;

  const auto& hidden = payload.hidden_last_token_per_layer;
  record.last_token = hidden.back();
  record.mean_pooled = payload.hidden_mean_pooled_last_layer;
  record.multi_layer.reserve(static_cast<std::size_t>(dims.MultiLayerSize()));
  for (int l = dims.layers - kMultiLayerDepth; l < dims.layers; ++l) {
    record.multi_layer.insert(record.multi_layer.end(), hidden[l].begin(),
                              hidden[l].end());
  }

  record.attn_multi_layer.assign(
      static_cast<std::size_t>(dims.AttnMultiLayerSize()), 0.0);
  record.attn_last_layer.assign(
      static_cast<std::size_t>(dims.AttnLastLayerSize()), 0.0);
  for (int l = 0; l < dims.layers; ++l) {
    for (int h = 0; h < dims.heads; ++h) {
      const AttentionStats stats = ComputeAttentionStats(
          payload.attention_rows[l][h], payload.prefix_token_count);
      for (AttentionStat stat : kAllStats) {
        const int s = static_cast<int>(stat);
        record.attn_multi_layer[(s * dims.heads + h) * dims.layers + l] =
            stats.Get(stat);
        if (l == dims.layers - 1) {
          record.attn_last_layer[s * dims.heads + h] = stats.Get(stat);
        }
      }
    }
  }
  return record;
}

void CheckRecordDims(const FeatureRecord& record) {
  const FeatureDims& dims = record.dims;
  CheckLength(record.last_token, dims.d_model, "last_token");
  CheckLength(record.mean_pooled, dims.d_model, "mean_pooled");
  CheckLength(record.multi_layer, dims.MultiLayerSize(), "multi_layer");
  CheckLength(record.attn_last_layer, dims.AttnLastLayerSize(),
              "attn_last_layer");
  CheckLength(record.attn_multi_layer, dims.AttnMultiLayerSize(),
              "attn_multi_layer");
}

std::vector<double> ApplySubset(const FeatureRecord& record,
                                const FeatureSubsetMask& mask) {
  CheckLength(record.attn_multi_layer, record.dims.AttnMultiLayerSize(),
              "attn_multi_layer");
  return SelectBlocks(record.attn_multi_layer,
                      record.dims.heads * record.dims.layers, mask);
}

std::vector<double> ApplySubsetLastLayer(const FeatureRecord& record,
                                         const FeatureSubsetMask& mask) {
  CheckLength(record.attn_last_layer, record.dims.AttnLastLayerSize(),
              "attn_last_layer");
  return SelectBlocks(record.attn_last_layer, record.dims.heads, mask);
}

std::string_view HiddenVariantName(HiddenVariant variant) {
  switch (variant) {
    case HiddenVariant::kLastToken:
      return "last_token";
    case HiddenVariant::kMeanPooled:
      return "mean_pooled";
    case HiddenVariant::kMultiLayer:
      return "multi_layer";
  }
  return "unknown";
}

HiddenVariant ParseHiddenVariant(std::string_view name) {
  for (HiddenVariant v : {HiddenVariant::kLastToken, HiddenVariant::kMeanPooled,
                          HiddenVariant::kMultiLayer}) {
    if (HiddenVariantName(v) == name) return v;
  }
  Fail(ErrorCategory::kConfig, "unknown hidden variant '" + std::string(name) + "'");
}

std::string_view AttentionVariantName(AttentionVariant variant) {
  switch (variant) {
    case AttentionVariant::kLastLayer:
      return "attn_last_layer";
    case AttentionVariant::kMultiLayer:
      return "attn_multi_layer";
  }
  return "unknown";
}

AttentionVariant ParseAttentionVariant(std::string_view name) {
  for (AttentionVariant v :
       {AttentionVariant::kLastLayer, AttentionVariant::kMultiLayer}) {
    if (AttentionVariantName(v) == name) return v;
  }
  Fail(ErrorCategory::kConfig,
       "unknown attention variant '" + std::string(name) + "'");
}

std::span<const double> HiddenSlice(const FeatureRecord& record,
                                    HiddenVariant variant) {
  switch (variant) {
    case HiddenVariant::kLastToken:
      return record.last_token;
    case HiddenVariant::kMeanPooled:
      return record.mean_pooled;
    case HiddenVariant::kMultiLayer:
      return record.multi_layer;
  }
  return {};
}

std::vector<double> AttentionSlice(const FeatureRecord& record,
                                   AttentionVariant variant,
                                   const FeatureSubsetMask& mask) {
  return variant == AttentionVariant::kLastLayer
             ? ApplySubsetLastLayer(record, mask)
             : ApplySubset(record, mask);
}

int AttentionSliceSize(const FeatureDims& dims, AttentionVariant variant,
                       const FeatureSubsetMask& mask) {
  const int per_stat = variant == AttentionVariant::kLastLayer
                           ? dims.heads
                           : dims.heads * dims.layers;
  return per_stat * mask.Count();
}

}  // namespace pairprobe
