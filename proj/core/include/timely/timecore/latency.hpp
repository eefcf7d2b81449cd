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

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "timely/timecore/duration.hpp"
#include "timely/timecore/rng.hpp"

namespace timely {

/// Tool latency injected by the environment.
///
/// `none` behaves as fixed(0). `per_action` dispatches on the action name
/// and always carries a fallback model for names without an entry.
class LatencyModel {
 public:
  enum class Kind { none, fixed, uniform, per_action };

  LatencyModel() = default;

  static LatencyModel none() { return LatencyModel{}; }
  static LatencyModel fixed(Duration d);
  static LatencyModel uniform(Duration lo, Duration hi);
  static LatencyModel per_action(std::vector<std::pair<std::string, LatencyModel>> entries,
                                 LatencyModel fallback);

  Kind kind() const noexcept { return kind_; }
  Duration fixed_value() const noexcept { return lo_; }
  Duration lo() const noexcept { return lo_; }
  Duration hi() const noexcept { return hi_; }
  const std::vector<std::pair<std::string, LatencyModel>>& entries() const noexcept { return entries_; }
  const LatencyModel& fallback() const;

  // Entry for an action name, or nullptr.
  const LatencyModel* find(std::string_view action) const;

 private:
  Kind kind_ = Kind::none;
  Duration lo_;
  Duration hi_;
  std::vector<std::pair<std::string, LatencyModel>> entries_;
  std::shared_ptr<const LatencyModel> fallback_;
};

// Draws the latency for `action_name`. Consumes one rng draw only when the
// resolved model is uniform.
Duration sample_latency(const LatencyModel& model, std::string_view action_name, SeededRng& rng);

void to_json(nlohmann::json& j, const LatencyModel& model);
void from_json(const nlohmann::json& j, LatencyModel& model);

}  // namespace timely
