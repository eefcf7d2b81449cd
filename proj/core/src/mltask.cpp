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

#include "timely/envsim/mltask.hpp"

#include <nlohmann/json.hpp>

#include "io_util.hpp"
#include "timely/timecore/errors.hpp"

namespace timely {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T field(const ordered_json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(where + ": field '" + key + "' has the wrong type");
  }
}

Duration positive_runtime(const ordered_json& j, const std::string& where) {
  const auto us = field<std::int64_t>(j, "runtime_us", where);
  if (us <= 0) throw ValidationError(where + ": runtime_us must be positive");
  return Duration::from_micros(us);
}

}  // namespace

const MLApproach* MLTaskModel::find(std::string_view key) const {
  for (const auto& [name, approach] : approaches) {
    if (name == key) return &approach;
  }
  return nullptr;
}

MLTaskModel load_ml_task(std::string_view bytes) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("ml task: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ParseError("ml task: top level must be an object", 0);

  MLTaskModel model;
  model.id = field<std::string>(doc, "id", "ml task");
  const std::string where = "ml task '" + model.id + "'";
  model.prompt = doc.value("prompt", "");
  if (!doc.contains("approaches") || !doc.at("approaches").is_object() || doc.at("approaches").empty()) {
    throw ValidationError(where + ": approaches must be a non-empty object");
  }
  for (const auto& [key, body] : doc.at("approaches").items()) {
    const std::string a_where = where + " approach '" + key + "'";
    MLApproach approach{field<double>(body, "accuracy", a_where), positive_runtime(body, a_where),
                        body.value("stdout", "")};
    if (!(approach.accuracy >= 0.0 && approach.accuracy <= 1.0)) {
      throw ValidationError(a_where + ": accuracy must lie in [0, 1]");
    }
    model.approaches.emplace_back(key, std::move(approach));
  }
  const auto failure = doc.contains("default_on_unknown") ? doc.at("default_on_unknown") : ordered_json();
  model.default_on_unknown = {field<std::string>(failure, "error_text", where + " default_on_unknown"),
                              positive_runtime(failure, where + " default_on_unknown")};
  return model;
}

MLTaskModel load_ml_task_file(const std::string& path) {
  return load_ml_task(detail::read_file(path));
}

std::optional<std::string> approach_directive(std::string_view payload) {
  constexpr std::string_view kDirective = "#approach:";
  std::size_t pos = 0;
  while (pos <= payload.size()) {
    const std::size_t end = std::min(payload.find('\n', pos), payload.size());
    const std::string_view line = trim(payload.substr(pos, end - pos));
    if (line.starts_with(kDirective)) {
      return std::string(trim(line.substr(kDirective.size())));
    }
    pos = end + 1;
  }
  return std::nullopt;
}

ToolResult ml_execute(const MLTaskModel& model, std::string_view payload) {
  ToolResult result;
  const auto key = approach_directive(payload);
  if (const MLApproach* approach = key ? model.find(*key) : nullptr) {
    result.text = approach->stdout_text;
    result.tool_latency = approach->runtime;
    result.accuracy = approach->accuracy;
  } else {
    result.text = model.default_on_unknown.error_text;
    result.tool_latency = model.default_on_unknown.runtime;
  }
  return result;
}

}  // namespace timely
