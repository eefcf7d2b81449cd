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

#include "timely/session/tags.hpp"

#include <charconv>
#include <regex>

namespace timely {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::optional<double> parse_decimal(const std::string& text) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || text.empty()) return std::nullopt;
  return value;
}

std::optional<std::int64_t> parse_integer(const std::string& text) {
  std::int64_t value = 0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (begin != end && *begin == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) return std::nullopt;
  return value;
}

}  // namespace

std::optional<std::string> find_tag(std::string_view body, std::string_view tag) {
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  const auto start = body.find(open);
  if (start == std::string_view::npos) return std::nullopt;
  const auto inner = start + open.size();
  const auto stop = body.find(close, inner);
  if (stop == std::string_view::npos) return std::nullopt;
  return std::string(body.substr(inner, stop - inner));
}

ParsedTags parse_tags(std::string_view body) {
  static const std::regex kDuration(R"(^total duration:\s*([0-9]+(?:\.[0-9]+)?)\s*seconds\.?$)",
                                    std::regex::icase);
  ParsedTags tags;
  if (auto s = find_tag(body, "summary")) tags.summary = trim(*s);
  if (auto a = find_tag(body, "answer")) tags.answer = trim(*a);
  if (auto c = find_tag(body, "conclusion")) {
    tags.conclusion_present = true;
    const std::string inner = trim(*c);
    std::smatch m;
    if (std::regex_match(inner, m, kDuration)) tags.conclusion_duration = parse_decimal(m[1].str());
  }
  if (auto s = find_tag(body, "score")) tags.score = parse_integer(trim(*s));
  if (auto a = find_tag(body, "accuracy")) tags.accuracy = parse_decimal(trim(*a));
  return tags;
}

}  // namespace timely
