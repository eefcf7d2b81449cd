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
#include <string>

#include <nlohmann/json.hpp>

#include "timely/timecore/duration.hpp"

namespace timely {

enum class TaskKind { reasoning, game, ml };

const char* to_string(TaskKind kind) noexcept;
TaskKind task_kind_from_string(const std::string& name);

/// Parameters of the time-aware reward.
///
/// r_f is paid for a timely, well-formatted completion; lambda weights the
/// time-utilization bonus. Every task family defaults to r_f = 0.1 and
/// lambda = 0.4.
struct RewardParams {
  double r_f = 0.1;
  double lambda = 0.4;
  TaskKind task_kind = TaskKind::reasoning;

  static RewardParams defaults_for(TaskKind kind) { return RewardParams{0.1, 0.4, kind}; }
};

struct RewardComponents {
  double format = 0.0;
  double accuracy = 0.0;
  double utilization = 0.0;
};

/// Reward value with its breakdown. Late episodes carry all-zero components.
struct RewardOutcome {
  double total = 0.0;
  RewardComponents components;
  bool on_time = false;
};

// sin(pi/2 * min(t / t_max, 1)). Throws InvalidArgument when t_max is zero.
double utilization(Duration t, Duration t_max);

// Piecewise reward:
//   t > t_max              -> 0
//   t <= t_max, r == 0     -> r_f
//   t <= t_max, r > 0      -> r_f + r + lambda * U(t)
// With format_ok == false the r_f term is withheld (strict-format mode).
// Throws InvalidArgument when r is outside [0, 1] or t_max is zero.
RewardOutcome compute_reward(Duration t, double r, Duration t_max, const RewardParams& params,
                             bool format_ok = true);

// (clamp(score, 0, max) / max)^(1/3). Throws InvalidArgument when s_max <= 0.
double game_accuracy(std::int64_t s_curr, std::int64_t s_max);

// 0.5 * accuracy. Throws InvalidArgument when accuracy is outside [0, 1].
double ml_accuracy_component(double accuracy);

constexpr double reasoning_accuracy(bool correct) noexcept { return correct ? 0.5 : 0.0; }

void to_json(nlohmann::json& j, const RewardParams& params);
void from_json(const nlohmann::json& j, RewardParams& params);
void to_json(nlohmann::json& j, const RewardOutcome& outcome);
void from_json(const nlohmann::json& j, RewardOutcome& outcome);

}  // namespace timely
