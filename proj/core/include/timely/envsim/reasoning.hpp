// Copyright 2026 The Timely Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "timely/timecore/duration.hpp"

namespace timely {

struct ReasoningTask {
  std::string id;
  std::string prompt;
  std::string ground_truth;
  Duration baseline_x;  // unconstrained baseline duration of this case
};

// One task per non-blank line: {id, prompt, ground_truth, baseline_x_us}.
// ParseError carries the 1-based line number; ValidationError names the
// task id.
std::vector<ReasoningTask> load_reasoning_tasks(std::string_view jsonl);
std::vector<ReasoningTask> load_reasoning_tasks_file(const std::string& path);

// Content of the first \boxed{...}, honoring nested braces.
std::optional<std::string> extract_boxed(std::string_view text);

// Trim, collapse whitespace runs, case-fold.
std::string normalize_answer(std::string_view text);

// Normalized exact match of the boxed content (or the whole answer when
// nothing is boxed) against the ground truth.
bool verify_answer(const ReasoningTask& task, std::string_view answer_text);

}  // namespace timely
