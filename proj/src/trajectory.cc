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

#include "pairprobe/trajectory.h"

#include <string>

#include "pairprobe/error.h"

namespace pairprobe {

Label LabelFromInt(int value) {
  if (value != 0 && value != 1) {
    Fail(ErrorCategory::kDomain,
         "label must be 0 or 1, got " + std::to_string(value));
  }
  return value == 1 ? Label::kCorrect : Label::kIncorrect;
}

std::string_view PrefixKindName(PrefixKind kind) {
  switch (kind) {
    case PrefixKind::kClean:
      return "clean";
    case PrefixKind::kContaminated:
      return "contaminated";
    case PrefixKind::kDiagnosticConsistentIncorrect:
      return "diagnostic_consistent_incorrect";
    case PrefixKind::kDiagnosticInconsistentCorrect:
      return "diagnostic_inconsistent_correct";
  }
  return "unknown";
}

PrefixKind ParsePrefixKind(std::string_view name) {
  for (PrefixKind kind :
       {PrefixKind::kClean, PrefixKind::kContaminated,
        PrefixKind::kDiagnosticConsistentIncorrect,
        PrefixKind::kDiagnosticInconsistentCorrect}) {
    if (PrefixKindName(kind) == name) return kind;
  }
  Fail(ErrorCategory::kParse, "unknown prefix kind '" + std::string(name) + "'");
}

std::string_view StepRoleName(StepRole role) {
  switch (role) {
    case StepRole::kThought:
      return "thought";
    case StepRole::kAction:
      return "action";
    case StepRole::kObservation:
      return "observation";
  }
  return "unknown";
}

std::string_view ContaminationTypeName(ContaminationType type) {
  switch (type) {
    case ContaminationType::kReasoningError:
      return "reasoning_error";
    case ContaminationType::kToolMisuse:
      return "tool_misuse";
    case ContaminationType::kObservationMisinterpretation:
      return "observation_misinterpretation";
    case ContaminationType::kStaleMemory:
      return "stale_memory";
  }
  return "unknown";
}

ContaminationType ParseContaminationType(std::string_view name) {
  for (ContaminationType type :
       {ContaminationType::kReasoningError, ContaminationType::kToolMisuse,
        ContaminationType::kObservationMisinterpretation,
        ContaminationType::kStaleMemory}) {
    if (ContaminationTypeName(type) == name) return type;
  }
  Fail(ErrorCategory::kParse,
       "unknown contamination type '" + std::string(name) + "'");
}

std::optional<int> EvaluationIndex(const Trajectory& trajectory) {
  std::optional<int> found;
  for (const Step& step : trajectory.steps) {
    if (!step.is_evaluation_turn) continue;
    if (found.has_value()) return std::nullopt;
    found = step.index;
  }
  return found;
}

std::vector<std::string> ValidateTrajectory(const Trajectory& trajectory) {
  std::vector<std::string> violations;
  const auto& steps = trajectory.steps;
  if (steps.empty()) {
    violations.push_back("trajectory has no steps");
  }
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i].index != static_cast<int>(i) + 1) {
      violations.push_back("step indices not contiguous from 1 at position " +
                           std::to_string(i));
      break;
    }
  }
  for (const Step& step : steps) {
    if (step.text_len_tokens < 0) {
      violations.push_back("negative token length at step " +
                           std::to_string(step.index));
    }
  }

  int flagged = 0;
  for (const Step& step : steps) flagged += step.is_evaluation_turn ? 1 : 0;
  if (flagged != 1) {
    violations.push_back("expected exactly one evaluation turn, found " +
                         std::to_string(flagged));
  }

  const std::optional<int> eval_index = EvaluationIndex(trajectory);
  if (eval_index.has_value()) {
    // The evaluation turn is the last assistant (non-observation) step.
    int last_assistant = 0;
    for (const Step& step : steps) {
      if (step.role != StepRole::kObservation) last_assistant = step.index;
    }
    for (const Step& step : steps) {
      if (step.index == *eval_index && step.role == StepRole::kObservation) {
        violations.push_back("evaluation turn is an observation");
      }
    }
    if (*eval_index != last_assistant) {
      violations.push_back("evaluation turn is not the last assistant step");
    }
  }

  const bool is_clean = trajectory.prefix_kind == PrefixKind::kClean;
  if (is_clean && trajectory.contamination.has_value()) {
    violations.push_back("clean trajectory carries contamination info");
  }
  if (!is_clean && !trajectory.contamination.has_value()) {
    violations.push_back("non-clean trajectory lacks contamination info");
  }

  if (trajectory.contamination.has_value()) {
    const ContaminationInfo& info = *trajectory.contamination;
    if (info.contaminated_index < 1) {
      violations.push_back("contaminated index must be >= 1");
    }
    if (info.distance < 1) {
      violations.push_back("contamination distance must be >= 1");
    }
    if (eval_index.has_value()) {
      if (info.contaminated_index == *eval_index) {
        violations.push_back("contamination at evaluation turn");
      } else if (info.contaminated_index > *eval_index) {
        violations.push_back("contamination after evaluation turn");
      }
      if (info.distance != *eval_index - info.contaminated_index) {
        violations.push_back(
            "distance mismatch: expected " +
            std::to_string(*eval_index - info.contaminated_index) + ", got " +
            std::to_string(info.distance));
      }
    }
  }
  return violations;
}

}  // namespace pairprobe
