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

#include "pairprobe/io.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pairprobe/error.h"

namespace pairprobe {
namespace {

const Json& Field(const Json& json, std::string_view key) {
  if (!json.is_object()) Fail(ErrorCategory::kParse, "expected a JSON object");
  const auto it = json.find(key);
  if (it == json.end()) {
    Fail(ErrorCategory::kParse, "missing field '" + std::string(key) + "'");
  }
  return *it;
}

double Number(const Json& json, std::string_view key) {
  const Json& v = Field(json, key);
  if (!v.is_number()) {
    Fail(ErrorCategory::kParse, "field '" + std::string(key) + "' is not a number");
  }
  return v.get<double>();
}

std::int64_t Integer(const Json& json, std::string_view key) {
  const Json& v = Field(json, key);
  if (!v.is_number_integer()) {
    Fail(ErrorCategory::kParse,
         "field '" + std::string(key) + "' is not an integer");
  }
  return v.get<std::int64_t>();
}

std::string String(const Json& json, std::string_view key) {
  const Json& v = Field(json, key);
  if (!v.is_string()) {
    Fail(ErrorCategory::kParse, "field '" + std::string(key) + "' is not a string");
  }
  return v.get<std::string>();
}

bool Bool(const Json& json, std::string_view key) {
  const Json& v = Field(json, key);
  if (!v.is_boolean()) {
    Fail(ErrorCategory::kParse, "field '" + std::string(key) + "' is not a bool");
  }
  return v.get<bool>();
}

std::vector<double> Vector(const Json& json, std::string_view key) {
  const Json& v = Field(json, key);
  if (!v.is_array()) {
    Fail(ErrorCategory::kParse, "field '" + std::string(key) + "' is not an array");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const Json& x : v) {
    if (!x.is_number()) {
      Fail(ErrorCategory::kParse,
           "field '" + std::string(key) + "' holds a non-number");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

Json VectorJson(const Eigen::VectorXd& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

Eigen::VectorXd EigenVector(const Json& json, std::string_view key) {
  const std::vector<double> v = Vector(json, key);
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

Json ParseJson(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    Fail(ErrorCategory::kParse, std::string("malformed JSON: ") + e.what());
  }
}

std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
    start = end + 1;
  }
  return out;
}

Json DimsToJson(const FeatureDims& dims) {
  return Json{{"d_model", dims.d_model},
              {"heads", dims.heads},
              {"layers", dims.layers}};
}

FeatureDims DimsFromJson(const Json& json) {
  FeatureDims dims;
  dims.d_model = static_cast<int>(Integer(json, "d_model"));
  dims.heads = static_cast<int>(Integer(json, "heads"));
  dims.layers = static_cast<int>(Integer(json, "layers"));
  if (dims.d_model < 1 || dims.heads < 1 || dims.layers < kMultiLayerDepth) {
    Fail(ErrorCategory::kDimension, "manifest dimensions out of range");
  }
  return dims;
}

Json FitReportToJson(const FitReport& report) {
  return Json{{"final_loss", report.final_loss},
              {"grad_norm", report.grad_norm},
              {"iterations", report.iterations},
              {"converged", report.converged}};
}

FitReport FitReportFromJson(const Json& json) {
  FitReport report;
  report.final_loss = Number(json, "final_loss");
  report.grad_norm = Number(json, "grad_norm");
  report.iterations = static_cast<int>(Integer(json, "iterations"));
  report.converged = Bool(json, "converged");
  return report;
}

Json ProbeConfigToJson(const ProbeConfig& config) {
  return Json{{"reg_c", config.reg_c},
              {"tol", config.tol},
              {"max_iter", config.max_iter}};
}

ProbeConfig ProbeConfigFromJson(const Json& json) {
  ProbeConfig config;
  config.reg_c = Number(json, "reg_c");
  config.tol = Number(json, "tol");
  config.max_iter = static_cast<int>(Integer(json, "max_iter"));
  return config;
}

}  // namespace

std::string Fnv1aHex(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCategory::kIo, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFileAtomic(const std::string& path, std::string_view contents) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
  }
  const std::string temp = path + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCategory::kIo, "cannot write '" + temp + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) Fail(ErrorCategory::kIo, "short write to '" + temp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(temp, target, ec);
  if (ec) Fail(ErrorCategory::kIo, "cannot rename onto '" + path + "'");
}

Json ManifestToJson(const FeatureManifest& manifest) {
  Json stats = Json::array();
  for (int s = 0; s < kNumAttentionStats; ++s) {
    stats.push_back(AttentionStatName(static_cast<AttentionStat>(s)));
  }
  Json json = DimsToJson(manifest.dims);
  json["type"] = "manifest";
  json["format"] = kFeatureFormat;
  json["split"] = manifest.split;
  json["generator_config_hash"] = manifest.generator_config_hash;
  json["attention_stats"] = stats;
  json["feature_ordering"] = "statistic,head,layer";
  return json;
}

FeatureManifest ManifestFromJson(const Json& json) {
  if (String(json, "type") != "manifest") {
    Fail(ErrorCategory::kParse, "first line is not a manifest");
  }
  if (String(json, "format") != kFeatureFormat) {
    Fail(ErrorCategory::kParse, "unsupported feature format");
  }
  if (String(json, "feature_ordering") != "statistic,head,layer") {
    Fail(ErrorCategory::kParse, "unsupported feature ordering");
  }
  FeatureManifest manifest;
  manifest.dims = DimsFromJson(json);
  manifest.split = String(json, "split");
  manifest.generator_config_hash = String(json, "generator_config_hash");
  return manifest;
}

Json RecordToJson(const FeatureRecord& record) {
  Json json;
  json["record_id"] = record.record_id;
  json["label"] = LabelValue(record.label);
  json["prefix_kind"] = PrefixKindName(record.prefix_kind);
  if (record.distance.has_value()) json["distance"] = *record.distance;
  if (record.contamination_type.has_value()) {
    json["contamination_type"] =
        ContaminationTypeName(*record.contamination_type);
  }
  if (record.trajectory_id.has_value()) {
    json["trajectory_id"] = *record.trajectory_id;
  }
  json["features"] = Json{
      {"last_token", record.last_token},
      {"mean_pooled", record.mean_pooled},
      {"multi_layer", record.multi_layer},
      {"attn_last_layer", record.attn_last_layer},
      {"attn_multi_layer", record.attn_multi_layer},
  };
  return json;
}

FeatureRecord RecordFromJson(const Json& json, const FeatureDims& dims) {
  FeatureRecord record;
  record.record_id = String(json, "record_id");
  record.dims = dims;
  record.label = LabelFromInt(static_cast<int>(Integer(json, "label")));
  record.prefix_kind = ParsePrefixKind(String(json, "prefix_kind"));
  if (json.contains("distance")) {
    record.distance = static_cast<int>(Integer(json, "distance"));
  }
  if (json.contains("contamination_type")) {
    record.contamination_type =
        ParseContaminationType(String(json, "contamination_type"));
  }
  if (json.contains("trajectory_id")) {
    record.trajectory_id = String(json, "trajectory_id");
  }
  const Json& features = Field(json, "features");
  record.last_token = Vector(features, "last_token");
  record.mean_pooled = Vector(features, "mean_pooled");
  record.multi_layer = Vector(features, "multi_layer");
  record.attn_last_layer = Vector(features, "attn_last_layer");
  record.attn_multi_layer = Vector(features, "attn_multi_layer");
  CheckRecordDims(record);
  return record;
}

std::string SerializeFeatureFile(const FeatureFile& file) {
  std::string out = ManifestToJson(file.manifest).dump();
  out += '\n';
  for (const FeatureRecord& record : file.records) {
    if (!(record.dims == file.manifest.dims)) {
      Fail(ErrorCategory::kDimension,
           "record " + record.record_id + " disagrees with the manifest");
    }
    out += RecordToJson(record).dump();
    out += '\n';
  }
  return out;
}

FeatureFile ParseFeatureFile(std::string_view text) {
  const std::vector<std::string_view> lines = Lines(text);
  if (lines.empty()) Fail(ErrorCategory::kParse, "feature file is empty");
  FeatureFile file;
  file.manifest = ManifestFromJson(ParseJson(lines.front()));
  file.records.reserve(lines.size() - 1);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    file.records.push_back(
        RecordFromJson(ParseJson(lines[i]), file.manifest.dims));
  }
  return file;
}

FeatureFile ReadFeatureFile(const std::string& path) {
  return ParseFeatureFile(ReadFile(path));
}

void WriteFeatureFile(const std::string& path, const FeatureFile& file) {
  WriteFileAtomic(path, SerializeFeatureFile(file));
}

Json ProbeToJson(const ProbeModel& probe) {
  return Json{{"standardizer",
               {{"mean", VectorJson(probe.standardizer.mean)},
                {"scale", VectorJson(probe.standardizer.scale)}}},
              {"weights", VectorJson(probe.weights)},
              {"bias", probe.bias},
              {"reg_c", probe.reg_c}};
}

ProbeModel ProbeFromJson(const Json& json) {
  ProbeModel probe;
  const Json& s = Field(json, "standardizer");
  probe.standardizer.mean = EigenVector(s, "mean");
  probe.standardizer.scale = EigenVector(s, "scale");
  probe.weights = EigenVector(json, "weights");
  probe.bias = Number(json, "bias");
  probe.reg_c = Number(json, "reg_c");
  if (probe.standardizer.mean.size() != probe.weights.size() ||
      probe.standardizer.scale.size() != probe.weights.size()) {
    Fail(ErrorCategory::kDimension, "probe vectors differ in length");
  }
  if ((probe.standardizer.scale.array() <= 0.0).any() || !(probe.reg_c > 0.0)) {
    Fail(ErrorCategory::kParse, "probe scale and reg_c must be positive");
  }
  return probe;
}

std::string SerializeModel(const ModelFile& model) {
  Json json;
  json["format_version"] = kModelFormatVersion;
  json["dims"] = DimsToJson(model.dims);
  json["metadata"] = Json{{"corpus_hash", model.metadata.corpus_hash},
                          {"seed", model.metadata.seed},
                          {"record_filter", model.metadata.record_filter}};
  if (model.pair.has_value()) {
    const PairModel& pair = *model.pair;
    json["kind"] = "pair";
    json["probe_config"] = ProbeConfigToJson(pair.config.probe);
    Json stage1 = ProbeToJson(pair.stage1);
    stage1["feature_variant"] = HiddenVariantName(pair.config.stage1_variant);
    stage1["fit_report"] = FitReportToJson(pair.stage1_report);
    Json stage2 = ProbeToJson(pair.stage2);
    stage2["feature_variant"] =
        AttentionVariantName(pair.config.stage2_variant);
    stage2["subset_mask"] = pair.config.mask.ToString();
    stage2["fit_report"] = FitReportToJson(pair.stage2_report);
    json["stage1"] = std::move(stage1);
    json["stage2"] = std::move(stage2);
    json["standardize_sbc"] = pair.config.standardize_sbc;
  } else if (model.baseline.has_value()) {
    const BaselineModel& b = *model.baseline;
    json["kind"] = "baseline";
    json["probe_config"] = ProbeConfigToJson(b.spec.probe);
    Json probe = ProbeToJson(b.probe);
    probe["baseline"] = BaselineName(b.spec.kind);
    probe["fit_report"] = FitReportToJson(b.report);
    json["probe"] = std::move(probe);
  } else {
    Fail(ErrorCategory::kConfig, "model file holds no model");
  }
  return json.dump(2) + "\n";
}

ModelFile ParseModel(std::string_view text) {
  const Json json = ParseJson(text);
  if (Integer(json, "format_version") != kModelFormatVersion) {
    Fail(ErrorCategory::kParse, "unsupported model format version");
  }
  ModelFile model;
  model.dims = DimsFromJson(Field(json, "dims"));
  const Json& meta = Field(json, "metadata");
  model.metadata.corpus_hash = String(meta, "corpus_hash");
  const Json& seed = Field(meta, "seed");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) {
    Fail(ErrorCategory::kParse, "seed is not an integer");
  }
  model.metadata.seed = seed.get<std::uint64_t>();
  model.metadata.record_filter = String(meta, "record_filter");
  const ProbeConfig probe_config =
      ProbeConfigFromJson(Field(json, "probe_config"));

  const std::string kind = String(json, "kind");
  if (kind == "pair") {
    PairModel pair;
    const Json& s1 = Field(json, "stage1");
    const Json& s2 = Field(json, "stage2");
    pair.stage1 = ProbeFromJson(s1);
    pair.stage2 = ProbeFromJson(s2);
    pair.stage1_report = FitReportFromJson(Field(s1, "fit_report"));
    pair.stage2_report = FitReportFromJson(Field(s2, "fit_report"));
    pair.config.probe = probe_config;
    pair.config.stage1_variant =
        ParseHiddenVariant(String(s1, "feature_variant"));
    pair.config.stage2_variant =
        ParseAttentionVariant(String(s2, "feature_variant"));
    pair.config.mask = FeatureSubsetMask::Parse(String(s2, "subset_mask"));
    pair.config.standardize_sbc = Bool(json, "standardize_sbc");
    const int expected_stage2 =
        AttentionSliceSize(model.dims, pair.config.stage2_variant,
                           pair.config.mask) +
        1;
    if (pair.stage2.input_dim() != expected_stage2) {
      Fail(ErrorCategory::kDimension,
           "stage 2 input dimension does not match the subset mask");
    }
    model.pair = std::move(pair);
  } else if (kind == "baseline") {
    BaselineModel b;
    const Json& probe = Field(json, "probe");
    b.probe = ProbeFromJson(probe);
    b.spec.kind = ParseBaseline(String(probe, "baseline"));
    b.spec.probe = probe_config;
    b.report = FitReportFromJson(Field(probe, "fit_report"));
    if (b.probe.input_dim() != BaselineInputDim(model.dims, b.spec.kind)) {
      Fail(ErrorCategory::kDimension, "baseline input dimension mismatch");
    }
    model.baseline = std::move(b);
  } else {
    Fail(ErrorCategory::kParse, "unknown model kind '" + kind + "'");
  }
  return model;
}

std::string SerializeTraces(const std::vector<TrajectoryTrace>& traces) {
  std::string out;
  for (const TrajectoryTrace& t : traces) {
    Json steps = Json::array();
    for (std::size_t i = 0; i < t.trace.steps.size(); ++i) {
      const RewardStep& s = t.trace.steps[i];
      Json step{{"step", i + 1},
                {"s_final", s.s_final},
                {"s_tilde", s.s_tilde},
                {"running_mean_before", s.running_mean_before},
                {"bonus", s.bonus},
                {"reward", s.reward}};
      if (i < t.record_ids.size()) step["record_id"] = t.record_ids[i];
      steps.push_back(std::move(step));
    }
    const Json line{{"trajectory_id", t.trajectory_id},
                    {"format", kTraceFormat},
                    {"steps", std::move(steps)}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

std::vector<TrajectoryTrace> ParseTraces(std::string_view text) {
  std::vector<TrajectoryTrace> traces;
  for (std::string_view line : Lines(text)) {
    const Json json = ParseJson(line);
    if (String(json, "format") != kTraceFormat) {
      Fail(ErrorCategory::kParse, "unsupported trace format");
    }
    TrajectoryTrace t;
    t.trajectory_id = String(json, "trajectory_id");
    const Json& steps = Field(json, "steps");
    if (!steps.is_array() || steps.empty()) {
      Fail(ErrorCategory::kParse, "trace has no steps");
    }
    for (const Json& s : steps) {
      RewardStep step;
      step.s_final = Number(s, "s_final");
      step.s_tilde = Number(s, "s_tilde");
      step.running_mean_before = Number(s, "running_mean_before");
      step.bonus = Number(s, "bonus");
      step.reward = Number(s, "reward");
      if (s.contains("record_id")) {
        t.record_ids.push_back(String(s, "record_id"));
      }
      t.trace.steps.push_back(step);
    }
    traces.push_back(std::move(t));
  }
  return traces;
}

std::string SerializeReport(const Report& report) {
  Json json(Json::value_t::object);
  for (const auto& [key, value] : report) json[key] = value;
  return json.dump(2) + "\n";
}

Report ParseReport(std::string_view text) {
  const Json json = ParseJson(text);
  if (!json.is_object()) Fail(ErrorCategory::kParse, "report is not an object");
  Report report;
  for (const auto& [key, value] : json.items()) report[key] = value;
  return report;
}

Json SynthConfigToJson(const SynthConfig& c) {
  return Json{{"seed", c.seed},
              {"n_train", c.n_train},
              {"n_test", c.n_test},
              {"d_model", c.d_model},
              {"heads", c.heads},
              {"layers", c.layers},
              {"contamination_fraction", c.contamination_fraction},
              {"diagnostic_fraction", c.diagnostic_fraction},
              {"mu_bc", c.mu_bc},
              {"mu_gc", c.mu_gc},
              {"noise_std", c.noise_std},
              {"max_distance", c.max_distance},
              {"attenuation_floor", c.attenuation_floor},
              {"decoupling_prob", c.decoupling_prob},
              {"prefix_tokens", c.prefix_tokens},
              {"eval_tokens", c.eval_tokens}};
}

SynthConfig SynthConfigFromJson(const Json& json, SynthConfig base) {
  if (!json.is_object()) Fail(ErrorCategory::kParse, "config is not an object");
  auto num = [&](const char* key, double& field) {
    if (json.contains(key)) field = Number(json, key);
  };
  auto integer = [&](const char* key, int& field) {
    if (json.contains(key)) field = static_cast<int>(Integer(json, key));
  };
  if (json.contains("seed")) {
    const Json& seed = json["seed"];
    if (!seed.is_number_integer()) {
      Fail(ErrorCategory::kParse, "seed is not an integer");
    }
    base.seed = seed.get<std::uint64_t>();
  }
  integer("n_train", base.n_train);
  integer("n_test", base.n_test);
  integer("d_model", base.d_model);
  integer("heads", base.heads);
  integer("layers", base.layers);
  num("contamination_fraction", base.contamination_fraction);
  num("diagnostic_fraction", base.diagnostic_fraction);
  num("mu_bc", base.mu_bc);
  num("mu_gc", base.mu_gc);
  num("noise_std", base.noise_std);
  integer("max_distance", base.max_distance);
  num("attenuation_floor", base.attenuation_floor);
  num("decoupling_prob", base.decoupling_prob);
  integer("prefix_tokens", base.prefix_tokens);
  integer("eval_tokens", base.eval_tokens);
  return base;
}

}  // namespace pairprobe
