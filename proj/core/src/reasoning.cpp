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

#include "timely/envsim/reasoning.hpp"

#include <nlohmann/json.hpp>

#include "io_util.hpp"
#include "json_util.hpp"
#include "timely/envsim/game.hpp"

namespace timely {

std::vector<ReasoningTask> load_reasoning_tasks(std::string_view jsonl) {
  std::vector<ReasoningTask> tasks;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= jsonl.size()) {
    const std::size_t end = std::min(jsonl.find('\n', pos), jsonl.size());
    const std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("reasoning tasks line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
    const std::string where = "reasoning task on line " + std::to_string(line_no);
    ReasoningTask task{
        detail::require<std::string>(doc, "id", where),
        detail::optional<std::string>(doc, "prompt", "", where),
        detail::require<std::string>(doc, "ground_truth", where),
        detail::require_duration(doc, "baseline_x_us", where),
    };
    if (normalize_answer(task.ground_truth).empty()) {
      throw ValidationError("reasoning task '" + task.id + "': ground_truth must not be empty");
    }
    if (task.baseline_x.is_zero()) {
      throw ValidationError("reasoning task '" + task.id + "': baseline_x_us must be positive");
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

std::vector<ReasoningTask> load_reasoning_tasks_file(const std::string& path) {
  return load_reasoning_tasks(detail::read_file(path));
}

std::optional<std::string> extract_boxed(std::string_view text) {
  constexpr std::string_view kMarker = "\\boxed{";
  const std::size_t start = text.find(kMarker);
  if (start == std::string_view::npos) return std::nullopt;
  int depth = 1;
  for (std::size_t i = start + kMarker.size(); i < text.size(); ++i) {
    if (text[i] == '{') ++depth;
    if (text[i] == '}' && --depth == 0) {
      return std::string(text.substr(start + kMarker.size(), i - start - kMarker.size()));
    }
  }
  return std::nullopt;
}

std::string normalize_answer(std::string_view text) {
  return normalize_phrase(text);
}

bool verify_answer(const ReasoningTask& task, std::string_view answer_text) {
  const auto boxed = extract_boxed(answer_text);
  const std::string candidate = normalize_answer(boxed ? std::string_view(*boxed) : answer_text);
  if (candidate.empty()) return false;
  return candidate == normalize_answer(task.ground_truth);
}

}  // namespace timely
