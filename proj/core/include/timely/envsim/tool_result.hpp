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

#include <cstdint>
#include <optional>
#include <string>

#include "timely/timecore/duration.hpp"

namespace timely {

// What an environment tool hands back for one call. `accuracy` is only set
// by ML code execution.
struct ToolResult {
  std::string text;
  Duration tool_latency;
  std::int64_t score_delta = 0;
  bool terminal = false;
  std::optional<double> accuracy;
};

}  // namespace timely
