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

#include "pairprobe/error.h"

namespace pairprobe {

std::string_view CategoryName(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kParse:
      return "parse";
    case ErrorCategory::kDimension:
      return "dimension";
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kMissingClass:
      return "missing-class";
    case ErrorCategory::kDomain:
      return "domain";
    case ErrorCategory::kEmptyInput:
      return "empty-input";
    case ErrorCategory::kIo:
      return "io";
  }
  return "unknown";
}

int ExitCode(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kParse:
      return 3;
    case ErrorCategory::kDimension:
      return 4;
    case ErrorCategory::kConfig:
      return 5;
    case ErrorCategory::kMissingClass:
      return 6;
    case ErrorCategory::kDomain:
      return 7;
    case ErrorCategory::kEmptyInput:
      return 8;
    case ErrorCategory::kIo:
      return 9;
  }
  return 1;
}

}  // namespace pairprobe
