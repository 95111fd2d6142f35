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

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "pairprobe/baselines.h"
#include "pairprobe/error.h"
#include "pairprobe/grpo.h"
#include "pairprobe/io.h"
#include "pairprobe/metrics.h"
#include "pairprobe/pair_model.h"
#include "pairprobe/reward.h"
#include "pairprobe/synth.h"

namespace pairprobe {
namespace {

// Applies a --config JSON object to `cmd`. Keys are long flag names with '-'
// or '_' separators; arrays supply repeated values. Flags given on the
// command line take precedence.
void ApplyConfigFile(CLI::App* cmd) {
  const CLI::Option* config = cmd->get_option("--config");
  if (config->count() == 0) return;
  Json json;
  try {
    json = Json::parse(ReadFile(config->as<std::string>()));
  } catch (const Json::exception& e) {
    Fail(ErrorCategory::kParse, std::string("config file: ") + e.what());
  }
  if (!json.is_object()) Fail(ErrorCategory::kParse, "config file is not a JSON object");
  for (const auto& [key, value] : json.items()) {
    std::string name = key;
    std::replace(name.begin(), name.end(), '_', '-');
    CLI::Option* opt = cmd->get_option_no_throw("--" + name);
    if (opt == nullptr || name == "config") {
      Fail(ErrorCategory::kConfig, "unknown config key '" + key + "'");
    }
    if (opt->count() > 0) continue;
    auto text = [](const Json& v) {
      if (v.is_object() || v.is_array() || v.is_null()) {
        Fail(ErrorCategory::kParse, "config values must be scalars or arrays");
      }
      return v.is_string() ? v.get<std::string>() : v.dump();
    };
    if (value.is_array()) {
      for (const Json& v : value) opt->add_result(text(v));
    } else {
      opt->add_result(text(value));
    }
    opt->run_callback();
  }
}

void AddConfigOption(CLI::App* app) {
  app->add_option("--config", "JSON file of option values")
      ->check(CLI::ExistingFile);
}

void WriteOrPrint(const std::optional<std::string>& path,
                  const std::string& text) {
  if (path.has_value()) {
    WriteFileAtomic(*path, text);
  } else {
    std::cout << text;
  }
}

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
  SynthConfig config;
  std::string out_dir;
};

void RegisterSynth(CLI::App& app, SynthArgs& a) {
  CLI::App* cmd = app.add_subcommand("synth", "Generate a synthetic corpus");
  AddConfigOption(cmd);
  SynthConfig& c = a.config;
  cmd->add_option("--out-dir", a.out_dir, "Output directory")->required();
  cmd->add_option("--seed", c.seed)->capture_default_str();
  cmd->add_option("--n-train", c.n_train)->capture_default_str();
  cmd->add_option("--n-test", c.n_test, "Records per clean/contaminated test split")
      ->capture_default_str();
  cmd->add_option("--d-model", c.d_model)->capture_default_str();
  cmd->add_option("--heads", c.heads)->capture_default_str();
  cmd->add_option("--layers", c.layers)->capture_default_str();
  cmd->add_option("--contamination-fraction", c.contamination_fraction)
      ->capture_default_str();
  cmd->add_option("--diagnostic-fraction", c.diagnostic_fraction)
      ->capture_default_str();
  cmd->add_option("--mu-bc", c.mu_bc)->capture_default_str();
  cmd->add_option("--mu-gc", c.mu_gc)->capture_default_str();
  cmd->add_option("--noise-std", c.noise_std)->capture_default_str();
  cmd->add_option("--max-distance", c.max_distance)->capture_default_str();
  cmd->add_option("--attenuation-floor", c.attenuation_floor)
      ->capture_default_str();
  cmd->add_option("--decoupling-prob", c.decoupling_prob)->capture_default_str();
  cmd->add_option("--prefix-tokens", c.prefix_tokens)->capture_default_str();
  cmd->add_option("--eval-tokens", c.eval_tokens)->capture_default_str();
}

int RunSynth(const SynthArgs& a) {
  a.config.Validate();
  const SynthCorpus corpus = GenerateCorpus(a.config);
  const Json config_json = SynthConfigToJson(a.config);
  const std::string config_hash = Fnv1aHex(config_json.dump());

  std::error_code ec;
  std::filesystem::create_directories(a.out_dir, ec);
  if (ec) Fail(ErrorCategory::kIo, "cannot create " + a.out_dir + ": " + ec.message());

  const std::pair<const char*, const SynthSplit*> splits[] = {
      {"train", &corpus.train},
      {"test_clean", &corpus.test_clean},
      {"test_contaminated", &corpus.test_contaminated},
      {"test_diagnostic", &corpus.test_diagnostic},
  };
  Json files = Json::object();
  for (const auto& [name, split] : splits) {
    FeatureFile file;
    file.manifest.dims = FeatureDims{a.config.d_model, a.config.heads,
                                     a.config.layers};
    file.manifest.split = name;
    file.manifest.generator_config_hash = config_hash;
    file.records = split->records;
    const std::string text = SerializeFeatureFile(file);
    const std::string filename = std::string(name) + ".jsonl";
    WriteFileAtomic((std::filesystem::path(a.out_dir) / filename).string(), text);
    files[filename] = Json{{"records", file.records.size()},
                           {"hash", Fnv1aHex(text)}};
  }
  const Json manifest{{"format", "pairprobe.corpus/1"},
                      {"seed", a.config.seed},
                      {"config", config_json},
                      {"config_hash", config_hash},
                      {"files", files}};
  WriteFileAtomic((std::filesystem::path(a.out_dir) / "manifest.json").string(),
                  manifest.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// Shared corpus loading.

struct LoadedInputs {
  std::vector<FeatureFile> files;
  std::vector<std::string> hashes;
  std::string combined_hash;
};

LoadedInputs LoadInputs(const std::vector<std::string>& paths) {
  LoadedInputs out;
  std::string all;
  for (const std::string& path : paths) {
    const std::string text = ReadFile(path);
    out.files.push_back(ParseFeatureFile(text));
    out.hashes.push_back(Fnv1aHex(text));
    all += out.hashes.back();
  }
  for (const FeatureFile& f : out.files) {
    if (!(f.manifest.dims == out.files.front().manifest.dims)) {
      Fail(ErrorCategory::kDimension, "input files disagree on dimensions");
    }
  }
  out.combined_hash = paths.size() == 1 ? out.hashes.front() : Fnv1aHex(all);
  return out;
}

std::vector<FeatureRecord> Pooled(const LoadedInputs& in) {
  std::vector<FeatureRecord> records;
  for (const FeatureFile& f : in.files) {
    records.insert(records.end(), f.records.begin(), f.records.end());
  }
  return records;
}

void CheckModelDims(const ModelFile& model, const LoadedInputs& in) {
  const FeatureDims& d = in.files.front().manifest.dims;
  if (!(d == model.dims)) {
    Fail(ErrorCategory::kDimension,
         "input dims (" + std::to_string(d.d_model) + "," +
             std::to_string(d.heads) + "," + std::to_string(d.layers) +
             ") do not match the model (" + std::to_string(model.dims.d_model) +
             "," + std::to_string(model.dims.heads) + "," +
             std::to_string(model.dims.layers) + ")");
  }
}

// ---------------------------------------------------------------------------
// train

struct TrainArgs {
  std::vector<std::string> inputs;
  std::string model_out;
  bool pair = false;
  std::string baseline;
  double reg_c = 0.01;
  double tol = 1e-8;
  int max_iter = 200;
  std::uint64_t seed = 42;
  bool clean_only = false;
  std::string stage1_variant = "last_token";
  std::string stage2_variant = "attn_multi_layer";
  std::string subset = "all";
  bool standardize_sbc = true;
};

void RegisterTrain(CLI::App& app, TrainArgs& a) {
  CLI::App* cmd = app.add_subcommand("train", "Fit PAIR or a baseline probe");
  AddConfigOption(cmd);
  cmd->add_option("--input", a.inputs, "Feature files")->required();
  cmd->add_option("--model-out", a.model_out)->required();
  CLI::Option* pair = cmd->add_flag("--pair", a.pair, "Train the two-stage model");
  CLI::Option* baseline =
      cmd->add_option("--baseline", a.baseline, "Baseline kind to train");
  pair->excludes(baseline);
  cmd->add_option("--reg-c", a.reg_c)->capture_default_str();
  cmd->add_option("--tol", a.tol)->capture_default_str();
  cmd->add_option("--max-iter", a.max_iter)->capture_default_str();
  cmd->add_option("--seed", a.seed)->capture_default_str();
  cmd->add_flag("--clean-only", a.clean_only,
                "Train on clean-prefix records only");
  cmd->add_option("--stage1-variant", a.stage1_variant)->capture_default_str();
  cmd->add_option("--stage2-variant", a.stage2_variant)->capture_default_str();
  cmd->add_option("--subset", a.subset, "Stage-2 attention statistics")
      ->capture_default_str();
  cmd->add_flag("--standardize-sbc,!--no-standardize-sbc", a.standardize_sbc)
      ->capture_default_str();
}

ProbeConfig ProbeConfigFrom(const TrainArgs& a) {
  if (!(a.reg_c > 0.0) || !std::isfinite(a.reg_c)) {
    Fail(ErrorCategory::kConfig, "--reg-c must be positive");
  }
  if (!(a.tol > 0.0)) Fail(ErrorCategory::kConfig, "--tol must be positive");
  if (a.max_iter < 1) Fail(ErrorCategory::kConfig, "--max-iter must be >= 1");
  return ProbeConfig{a.reg_c, a.tol, a.max_iter};
}

int RunTrain(const TrainArgs& a) {
  if (!a.pair && a.baseline.empty()) {
    Fail(ErrorCategory::kConfig, "one of --pair or --baseline is required");
  }
  const ProbeConfig probe = ProbeConfigFrom(a);
  const LoadedInputs in = LoadInputs(a.inputs);
  std::vector<FeatureRecord> records = Pooled(in);
  if (a.clean_only) {
    std::erase_if(records, [](const FeatureRecord& r) {
      return r.prefix_kind != PrefixKind::kClean;
    });
  }
  if (records.empty()) Fail(ErrorCategory::kEmptyInput, "no training records");

  ModelFile model;
  model.dims = CheckUniformDims(records);
  model.metadata = TrainingMetadata{in.combined_hash, a.seed,
                                    a.clean_only ? "clean" : "all"};
  if (a.pair) {
    PairConfig config;
    config.stage1_variant = ParseHiddenVariant(a.stage1_variant);
    config.stage2_variant = ParseAttentionVariant(a.stage2_variant);
    config.mask = FeatureSubsetMask::Parse(a.subset);
    config.standardize_sbc = a.standardize_sbc;
    config.probe = probe;
    model.pair = TrainPair(records, config);
  } else {
    BaselineSpec spec{ParseBaseline(a.baseline), probe};
    std::vector<std::vector<double>> rows;
    rows.reserve(records.size());
    for (const FeatureRecord& r : records) rows.push_back(BaselineFeatures(r, spec.kind));
    ProbeFit fit = FitProbe(RowsToMatrix(rows), Labels(records), probe);
    model.baseline = BaselineModel{spec, std::move(fit.model), std::move(fit.report)};
  }
  WriteFileAtomic(a.model_out, SerializeModel(model));
  return 0;
}

// ---------------------------------------------------------------------------
// Scoring shared by score and eval.

std::vector<double> ScoreRecords(const ModelFile& model,
                                 std::span<const FeatureRecord> records) {
  if (model.is_pair()) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const FeatureRecord& r : records) out.push_back(model.pair->ScoreFinal(r));
    return out;
  }
  return ScoreBaseline(model.baseline->probe, model.baseline->spec, records);
}

// ---------------------------------------------------------------------------
// score

struct ScoreArgs {
  std::string model;
  std::vector<std::string> inputs;
  std::string trace_out;
  std::string mode = "momentum";
  double alpha = 5.0;
  double temperature = 2.0;
  double clip = 0.05;
  int steps_per_trajectory = 4;
};

void RegisterScore(CLI::App& app, ScoreArgs& a) {
  CLI::App* cmd = app.add_subcommand("score", "Write per-step reward traces");
  AddConfigOption(cmd);
  cmd->add_option("--model", a.model)->required();
  cmd->add_option("--input", a.inputs)->required();
  cmd->add_option("--trace-out", a.trace_out)->required();
  cmd->add_option("--mode", a.mode, "vanilla or momentum")->capture_default_str();
  cmd->add_option("--alpha", a.alpha)->capture_default_str();
  cmd->add_option("--temperature", a.temperature)->capture_default_str();
  cmd->add_option("--clip", a.clip)->capture_default_str();
  cmd->add_option("--steps-per-trajectory", a.steps_per_trajectory,
                  "Chunk size for records without a trajectory_id")
      ->capture_default_str();
}

struct Grouped {
  std::string id;
  std::vector<std::size_t> members;
};

// Records sharing a trajectory_id form one trajectory in file order; the
// rest are chunked consecutively.
std::vector<Grouped> GroupTrajectories(std::span<const FeatureRecord> records,
                                       int chunk) {
  std::vector<Grouped> groups;
  std::map<std::string, std::size_t> by_id;
  std::optional<std::size_t> open_chunk;
  int chunks = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const FeatureRecord& r = records[i];
    if (r.trajectory_id.has_value()) {
      auto [it, inserted] = by_id.emplace(*r.trajectory_id, groups.size());
      if (inserted) groups.push_back({*r.trajectory_id, {}});
      groups[it->second].members.push_back(i);
      continue;
    }
    if (!open_chunk.has_value() ||
        groups[*open_chunk].members.size() >= static_cast<std::size_t>(chunk)) {
      char id[32];
      std::snprintf(id, sizeof(id), "chunk-%05d", chunks++);
      if (by_id.count(id) > 0) {
        Fail(ErrorCategory::kConfig, std::string("trajectory id clash: ") + id);
      }
      open_chunk = groups.size();
      groups.push_back({id, {}});
    }
    groups[*open_chunk].members.push_back(i);
  }
  return groups;
}

int RunScore(const ScoreArgs& a) {
  RewardConfig reward{a.temperature, a.clip, a.alpha, ParseRewardMode(a.mode)};
  reward.Validate();
  if (a.steps_per_trajectory < 1) {
    Fail(ErrorCategory::kConfig, "--steps-per-trajectory must be >= 1");
  }
  const std::string model_text = ReadFile(a.model);
  const ModelFile model = ParseModel(model_text);
  const LoadedInputs in = LoadInputs(a.inputs);
  CheckModelDims(model, in);
  const std::vector<FeatureRecord> records = Pooled(in);
  if (records.empty()) Fail(ErrorCategory::kEmptyInput, "no records to score");
  const std::vector<double> scores = ScoreRecords(model, records);

  std::vector<TrajectoryTrace> traces;
  for (const Grouped& g : GroupTrajectories(records, a.steps_per_trajectory)) {
    TrajectoryTrace t;
    t.trajectory_id = g.id;
    std::vector<double> s;
    for (std::size_t i : g.members) {
      s.push_back(scores[i]);
      t.record_ids.push_back(records[i].record_id);
    }
    t.trace = MomentumReward(s, reward);
    traces.push_back(std::move(t));
  }
  WriteFileAtomic(a.trace_out, SerializeTraces(traces));

  const Json echo{{"mode", RewardModeName(reward.mode)},
                  {"alpha", reward.alpha},
                  {"temperature", reward.temperature},
                  {"clip", reward.clip},
                  {"steps_per_trajectory", a.steps_per_trajectory},
                  {"model_hash", Fnv1aHex(model_text)},
                  {"input_hashes", in.hashes},
                  {"trajectories", traces.size()}};
  WriteFileAtomic(a.trace_out + ".config.json", echo.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string model;
  std::vector<std::string> inputs;
  std::optional<std::string> report_out;
  bool stratify = false;
  int distance_cap = 7;
  std::optional<std::string> subset;
  std::vector<std::string> train_inputs;
  int ece_bins = 10;
};

void RegisterEval(CLI::App& app, EvalArgs& a) {
  CLI::App* cmd = app.add_subcommand("eval", "AUROC / ECE report");
  AddConfigOption(cmd);
  cmd->add_option("--model", a.model)->required();
  cmd->add_option("--input", a.inputs)->required();
  cmd->add_option("--report-out", a.report_out, "Defaults to stdout");
  cmd->add_flag("--stratify-distance", a.stratify,
                "Per contamination-distance bucket AUROC");
  cmd->add_option("--distance-cap", a.distance_cap, "Last bucket is cap+")
      ->capture_default_str();
  cmd->add_option("--subset", a.subset,
                  "Refit Stage 2 on these attention statistics");
  cmd->add_option("--train-input", a.train_inputs,
                  "Training records for --subset refits");
  cmd->add_option("--ece-bins", a.ece_bins)->capture_default_str();
}

struct NamedScores {
  std::string name;
  std::vector<double> scores;
};

void AddMetrics(Report& report, const std::string& prefix,
                const std::vector<NamedScores>& scorers,
                const std::vector<int>& labels, const EceConfig& ece) {
  for (const NamedScores& s : scorers) {
    ScoredSet set{s.scores, labels, std::nullopt};
    report[prefix + "auroc." + s.name] = Auroc(set);
    report[prefix + "ece." + s.name] = ExpectedCalibrationError(set, ece);
    report[prefix + "accuracy." + s.name] = Accuracy(set);
  }
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  report[prefix + "count.records"] = labels.size();
  report[prefix + "count.positive"] = positives;
}

int RunEval(const EvalArgs& a) {
  if (a.ece_bins < 1) Fail(ErrorCategory::kConfig, "--ece-bins must be >= 1");
  if (a.distance_cap < 2) Fail(ErrorCategory::kConfig, "--distance-cap must be >= 2");
  const std::string model_text = ReadFile(a.model);
  ModelFile model = ParseModel(model_text);
  const LoadedInputs in = LoadInputs(a.inputs);
  CheckModelDims(model, in);

  Report report;
  if (a.subset.has_value()) {
    if (!model.is_pair()) Fail(ErrorCategory::kConfig, "--subset needs a pair model");
    if (a.train_inputs.empty()) {
      Fail(ErrorCategory::kConfig, "--subset needs --train-input");
    }
    const LoadedInputs train = LoadInputs(a.train_inputs);
    CheckModelDims(model, train);
    std::vector<FeatureRecord> records = Pooled(train);
    if (model.metadata.record_filter == "clean") {
      std::erase_if(records, [](const FeatureRecord& r) {
        return r.prefix_kind != PrefixKind::kClean;
      });
    }
    PairConfig config = model.pair->config;
    config.mask = FeatureSubsetMask::Parse(*a.subset);
    model.pair = FitStage2(ProbeFit{model.pair->stage1, model.pair->stage1_report},
                           records, config);
    report["config.subset"] = config.mask.ToString();
    report["config.train_input_hash"] = train.combined_hash;
  }

  const EceConfig ece{a.ece_bins};
  auto scorers_for = [&](std::span<const FeatureRecord> records) {
    std::vector<NamedScores> out;
    if (model.is_pair()) {
      NamedScores pair{"pair", {}}, stage1{"stage1_only", {}};
      for (const FeatureRecord& r : records) {
        const PairScores s = model.pair->Score(r);
        pair.scores.push_back(s.s_final);
        stage1.scores.push_back(s.s_bc);
      }
      out.push_back(std::move(pair));
      out.push_back(std::move(stage1));
    } else {
      out.push_back({"baseline", ScoreRecords(model, records)});
    }
    return out;
  };

  const std::vector<FeatureRecord> pooled = Pooled(in);
  if (pooled.empty()) Fail(ErrorCategory::kEmptyInput, "no records to evaluate");
  const std::vector<NamedScores> pooled_scores = scorers_for(pooled);
  const std::vector<int> labels = Labels(pooled);
  AddMetrics(report, "", pooled_scores, labels, ece);

  if (in.files.size() > 1) {
    std::map<std::string, int> seen;
    for (const FeatureFile& f : in.files) {
      std::string name = f.manifest.split.empty() ? "input" : f.manifest.split;
      if (seen[name]++ > 0) name += "_" + std::to_string(seen[name] - 1);
      AddMetrics(report, "split." + name + ".", scorers_for(f.records),
                 Labels(f.records), ece);
    }
  }

  if (a.stratify) {
    std::vector<std::optional<int>> strata;
    for (const FeatureRecord& r : pooled) strata.push_back(r.distance);
    for (const NamedScores& s : pooled_scores) {
      ScoredSet set{s.scores, labels, strata};
      for (const auto& [bucket, auroc] : StratifiedAuroc(set, a.distance_cap)) {
        report["bucket." + bucket.Name() + ".auroc." + s.name] = auroc;
      }
    }
  }

  report["config.model_hash"] = Fnv1aHex(model_text);
  report["config.model_kind"] =
      model.is_pair() ? std::string("pair")
                      : std::string(BaselineName(model.baseline->spec.kind));
  Json inputs = Json::array();
  for (std::size_t i = 0; i < in.files.size(); ++i) {
    inputs.push_back(Json{{"split", in.files[i].manifest.split},
                          {"hash", in.hashes[i]}});
  }
  report["config.inputs"] = inputs;
  report["config.ece_bins"] = a.ece_bins;
  report["config.stratify_distance"] = a.stratify;
  report["config.distance_cap"] = a.distance_cap;
  WriteOrPrint(a.report_out, SerializeReport(report));
  return 0;
}

// ---------------------------------------------------------------------------
// grpo-sim

struct GrpoArgs {
  std::string traces;
  int group_size = kDefaultGroupSize;
  std::string aggregation = "mean";
  double alpha = 5.0;
  double eps = 1e-8;
  double collapse_threshold = 1e-6;
  std::optional<std::string> report_out;
};

void RegisterGrpo(CLI::App& app, GrpoArgs& a) {
  CLI::App* cmd = app.add_subcommand(
      "grpo-sim", "Within-group return variance, vanilla vs momentum");
  AddConfigOption(cmd);
  cmd->add_option("--traces", a.traces)->required();
  cmd->add_option("--group-size", a.group_size)->capture_default_str();
  cmd->add_option("--aggregation", a.aggregation, "mean or sum")
      ->capture_default_str();
  cmd->add_option("--alpha", a.alpha, "Momentum scale for the recomputed rewards")
      ->capture_default_str();
  cmd->add_option("--eps", a.eps, "Advantage denominator guard")
      ->capture_default_str();
  cmd->add_option("--collapse-threshold", a.collapse_threshold)
      ->capture_default_str();
  cmd->add_option("--report-out", a.report_out, "Defaults to stdout");
}

int RunGrpo(const GrpoArgs& a) {
  if (a.group_size < 2) Fail(ErrorCategory::kConfig, "--group-size must be >= 2");
  if (!(a.alpha >= 0.0)) Fail(ErrorCategory::kConfig, "--alpha must be >= 0");
  if (!(a.eps >= 0.0)) Fail(ErrorCategory::kConfig, "--eps must be >= 0");
  const ReturnAggregation aggregation = ParseAggregation(a.aggregation);
  const std::string text = ReadFile(a.traces);
  const std::vector<TrajectoryTrace> traces = ParseTraces(text);
  const std::size_t g = static_cast<std::size_t>(a.group_size);
  const std::size_t n_groups = traces.size() / g;
  if (n_groups == 0) {
    Fail(ErrorCategory::kEmptyInput, "fewer trajectories than --group-size");
  }

  std::vector<GroupBatch> vanilla, momentum;
  double max_abs_sum = 0.0;
  for (std::size_t k = 0; k < n_groups; ++k) {
    std::vector<std::vector<double>> streams;
    for (std::size_t i = k * g; i < (k + 1) * g; ++i) {
      std::vector<double> s;
      for (const RewardStep& step : traces[i].trace.steps) s.push_back(step.s_tilde);
      streams.push_back(std::move(s));
    }
    ModePair p = GroupFromClippedStreams(streams, a.alpha, aggregation, a.eps);
    for (const GroupBatch* b : {&p.vanilla, &p.momentum}) {
      double sum = 0.0;
      for (double adv : GroupAdvantages(*b)) sum += adv;
      max_abs_sum = std::max(max_abs_sum, std::abs(sum));
    }
    vanilla.push_back(std::move(p.vanilla));
    momentum.push_back(std::move(p.momentum));
  }
  const VarianceReport vr =
      VarianceDiagnostic(vanilla, momentum, a.collapse_threshold);

  Report report;
  Json per_vanilla = Json::array(), per_momentum = Json::array();
  for (const GroupVariance& v : vr.groups) {
    per_vanilla.push_back(v.vanilla);
    per_momentum.push_back(v.momentum);
  }
  report["count.groups"] = n_groups;
  report["count.trajectories"] = traces.size();
  report["count.dropped_trajectories"] = traces.size() - n_groups * g;
  report["variance.vanilla.mean"] = vr.MeanVanilla();
  report["variance.momentum.mean"] = vr.MeanMomentum();
  report["variance.vanilla.per_group"] = per_vanilla;
  report["variance.momentum.per_group"] = per_momentum;
  report["collapsed.vanilla"] = vr.collapsed_vanilla;
  report["collapsed.momentum"] = vr.collapsed_momentum;
  report["advantage_sum.max_abs"] = max_abs_sum;
  report["config.traces_hash"] = Fnv1aHex(text);
  report["config.group_size"] = a.group_size;
  report["config.aggregation"] = AggregationName(aggregation);
  report["config.alpha"] = a.alpha;
  report["config.eps"] = a.eps;
  report["config.collapse_threshold"] = a.collapse_threshold;
  WriteOrPrint(a.report_out, SerializeReport(report));
  return 0;
}

}  // namespace

int RunCli(const std::vector<std::string>& args) {
  CLI::App app{"Prefix-aware internal reward model", "pairprobe"};
  app.require_subcommand(1);

  SynthArgs synth;
  TrainArgs train;
  ScoreArgs score;
  EvalArgs eval;
  GrpoArgs grpo;
  RegisterSynth(app, synth);
  RegisterTrain(app, train);
  RegisterScore(app, score);
  RegisterEval(app, eval);
  RegisterGrpo(app, grpo);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);

    CLI::App* cmd = app.get_subcommands().front();
    ApplyConfigFile(cmd);
    if (app.got_subcommand("synth")) return RunSynth(synth);
    if (app.got_subcommand("train")) return RunTrain(train);
    if (app.got_subcommand("score")) return RunScore(score);
    if (app.got_subcommand("eval")) return RunEval(eval);
    if (app.got_subcommand("grpo-sim")) return RunGrpo(grpo);
    Fail(ErrorCategory::kConfig, "no subcommand");
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << CategoryName(ErrorCategory::kConfig) << ": "
              << e.what() << "\n";
    return ExitCode(ErrorCategory::kConfig);
  } catch (const Error& e) {
    std::cerr << "error: " << CategoryName(e.category()) << ": " << e.what()
              << "\n";
    return ExitCode(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pairprobe
