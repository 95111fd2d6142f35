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

#ifndef PAIRPROBE_IO_H_
#define PAIRPROBE_IO_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pairprobe/baselines.h"
#include "pairprobe/features.h"
#include "pairprobe/pair_model.h"
#include "pairprobe/reward.h"
#include "pairprobe/synth.h"

namespace pairprobe {

inline constexpr std::string_view kFeatureFormat = "pairprobe.features/1";
inline constexpr std::string_view kTraceFormat = "pairprobe.traces/1";
inline constexpr int kModelFormatVersion = 1;

using Json = nlohmann::json;

// 64-bit FNV-1a, rendered as 16 lowercase hex digits.
std::string Fnv1aHex(std::string_view bytes);

std::string ReadFile(const std::string& path);
// Writes to a sibling temporary file, then renames it over `path`.
void WriteFileAtomic(const std::string& path, std::string_view contents);

// ---------------------------------------------------------------------------
// Feature files: one manifest line, then one record per line.

struct FeatureManifest {
  FeatureDims dims;
  std::string split;
  std::string generator_config_hash;
};

struct FeatureFile {
  FeatureManifest manifest;
  std::vector<FeatureRecord> records;
};

Json ManifestToJson(const FeatureManifest& manifest);
FeatureManifest ManifestFromJson(const Json& json);
Json RecordToJson(const FeatureRecord& record);
// Throws kDimension when the record disagrees with `dims`.
FeatureRecord RecordFromJson(const Json& json, const FeatureDims& dims);

std::string SerializeFeatureFile(const FeatureFile& file);
FeatureFile ParseFeatureFile(std::string_view text);
FeatureFile ReadFeatureFile(const std::string& path);
void WriteFeatureFile(const std::string& path, const FeatureFile& file);

// ---------------------------------------------------------------------------
// Model files.

struct BaselineModel {
  BaselineSpec spec;
  ProbeModel probe;
  FitReport report;
};

struct TrainingMetadata {
  std::string corpus_hash;
  std::uint64_t seed = 0;
  // "all" or "clean".
  std::string record_filter = "all";
};

struct ModelFile {
  FeatureDims dims;
  std::optional<PairModel> pair;
  std::optional<BaselineModel> baseline;
  TrainingMetadata metadata;

  bool is_pair() const { return pair.has_value(); }
};

Json ProbeToJson(const ProbeModel& probe);
ProbeModel ProbeFromJson(const Json& json);

std::string SerializeModel(const ModelFile& model);
ModelFile ParseModel(std::string_view text);

// ---------------------------------------------------------------------------
// Reward traces.

struct TrajectoryTrace {
  std::string trajectory_id;
  std::vector<std::string> record_ids;
  RewardTrace trace;
};

std::string SerializeTraces(const std::vector<TrajectoryTrace>& traces);
std::vector<TrajectoryTrace> ParseTraces(std::string_view text);

// ---------------------------------------------------------------------------
// Reports: a flat key -> value document.

using Report = std::map<std::string, Json>;
std::string SerializeReport(const Report& report);
Report ParseReport(std::string_view text);

Json SynthConfigToJson(const SynthConfig& config);
// Fields absent from `json` keep the values in `base`.
SynthConfig SynthConfigFromJson(const Json& json, SynthConfig base = {});

}  // namespace pairprobe

#endif  // PAIRPROBE_IO_H_
