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
#include <utility>
#include <vector>

#include "timely/envsim/tool_result.hpp"

namespace timely {

struct MLApproach {
  double accuracy = 0.0;
  Duration runtime;
  std::string stdout_text;
};

struct MLFailure {
  std::string error_text;
  Duration runtime;
};

/// Simulated ML task: code execution is a lookup keyed by the
/// `#approach: <key>` directive in the submitted payload.
struct MLTaskModel {
  std::string id;
  std::string prompt;
  std::vector<std::pair<std::string, MLApproach>> approaches;  // file order
  MLFailure default_on_unknown;

  const MLApproach* find(std::string_view key) const;
};

MLTaskModel load_ml_task(std::string_view bytes);
MLTaskModel load_ml_task_file(const std::string& path);

// Key named by the first `#approach:` directive line, if any.
std::optional<std::string> approach_directive(std::string_view payload);

// Looks up the directive. tool_latency is the approach runtime; unknown or
// missing directives return the failure branch without an accuracy.
ToolResult ml_execute(const MLTaskModel& model, std::string_view payload);

}  // namespace timely
