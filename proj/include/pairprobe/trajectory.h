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

#ifndef PAIRPROBE_TRAJECTORY_H_
#define PAIRPROBE_TRAJECTORY_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pairprobe {

// Condition of the history the evaluation turn was produced under. The two
// diagnostic kinds are the adversarial turns where belief-consistency and
// grounded correctness disagree.
enum class PrefixKind {
  kClean,
  kContaminated,
  kDiagnosticConsistentIncorrect,
  kDiagnosticInconsistentCorrect,
};

enum class StepRole { kThought, kAction, kObservation };

enum class ContaminationType {
  kReasoningError,
  kToolMisuse,
  kObservationMisinterpretation,
  kStaleMemory,
};

enum class Label : std::uint8_t { kIncorrect = 0, kCorrect = 1 };

inline int LabelValue(Label label) { return static_cast<int>(label); }
Label LabelFromInt(int value);

std::string_view PrefixKindName(PrefixKind kind);
PrefixKind ParsePrefixKind(std::string_view name);
std::string_view StepRoleName(StepRole role);
std::string_view ContaminationTypeName(ContaminationType type);
ContaminationType ParseContaminationType(std::string_view name);

struct Step {
  int index = 0;  // 1-based.
  StepRole role = StepRole::kThought;
  int text_len_tokens = 0;
  bool is_evaluation_turn = false;
};

struct ContaminationInfo {
  int contaminated_index = 0;  // 1-based step index of the corrupted turn.
  ContaminationType type = ContaminationType::kReasoningError;
  int distance = 0;  // evaluation index - contaminated_index.
};

struct Trajectory {
  std::string task_id;
  std::vector<Step> steps;
  PrefixKind prefix_kind = PrefixKind::kClean;
  std::optional<ContaminationInfo> contamination;
};

// Returns every invariant violation found in `trajectory`. An empty result
// means the trajectory is well formed. Never throws.
std::vector<std::string> ValidateTrajectory(const Trajectory& trajectory);

// Index of the evaluation step, if exactly one step is flagged.
std::optional<int> EvaluationIndex(const Trajectory& trajectory);

}  // namespace pairprobe

#endif  // PAIRPROBE_TRAJECTORY_H_
