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

#include <string>

#include <nlohmann/json.hpp>

#include "timely/timecore/duration.hpp"
#include "timely/timecore/errors.hpp"

namespace timely::detail {

template <typename T>
T require(const nlohmann::json& j, const char* key, const std::string& context) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(context + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(context + ": field '" + key + "' has the wrong type (" + e.what() + ")");
  }
}

template <typename T>
T optional(const nlohmann::json& j, const char* key, T fallback, const std::string& context) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return require<T>(j, key, context);
}

inline Duration require_duration(const nlohmann::json& j, const char* key, const std::string& context) {
  const auto us = require<std::int64_t>(j, key, context);
  if (us < 0) throw ValidationError(context + ": field '" + key + "' must be non-negative");
  return Duration::from_micros(us);
}

inline Duration optional_duration(const nlohmann::json& j, const char* key, Duration fallback,
                                  const std::string& context) {
  if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
  return require_duration(j, key, context);
}

}  // namespace timely::detail
