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
#include <string_view>

namespace timely {

// Output tags a policy may emit. Each holds the first occurrence of its
// tag pair; malformed numeric content leaves the field empty.
struct ParsedTags {
  std::optional<std::string> summary;
  std::optional<double> conclusion_duration;  // from "total duration: {t} seconds"
  std::optional<std::string> answer;
  std::optional<std::int64_t> score;
  std::optional<double> accuracy;
  bool conclusion_present = false;  // tag pair seen, even if its text is malformed

  // True if any tag that ends an episode is present.
  bool has_final_construct() const noexcept {
    return answer.has_value() || score.has_value() || accuracy.has_value() || conclusion_present;
  }
};

ParsedTags parse_tags(std::string_view body);

// Raw inner text of the first <tag>...</tag>, untrimmed.
std::optional<std::string> find_tag(std::string_view body, std::string_view tag);

}  // namespace timely
