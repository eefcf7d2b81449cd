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

#include "timely/reward/reward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "json_util.hpp"

namespace timely {

const char* to_string(TaskKind kind) noexcept {
  switch (kind) {
    case TaskKind::reasoning: return "reasoning";
    case TaskKind::game: return "game";
    case TaskKind::ml: return "ml";
  }
  return "reasoning";
}

TaskKind task_kind_from_string(const std::string& name) {
  if (name == "reasoning") return TaskKind::reasoning;
  if (name == "game") return TaskKind::game;
  if (name == "ml") return TaskKind::ml;
  throw ValidationError("unknown task kind '" + name + "'");
}

double utilization(Duration t, Duration t_max) {
  if (t_max.is_zero()) throw InvalidArgument("utilization: t_max must be positive");
  const double ratio = std::min(static_cast<double>(t.micros()) / static_cast<double>(t_max.micros()), 1.0);
  return std::sin(std::numbers::pi / 2.0 * ratio);
}

RewardOutcome compute_reward(Duration t, double r, Duration t_max, const RewardParams& params,
                             bool format_ok) {
  if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("compute_reward: r must lie in [0, 1]");
  if (t_max.is_zero()) throw InvalidArgument("compute_reward: t_max must be positive");

  RewardOutcome out;
  if (t > t_max) return out;

  out.on_time = true;
  out.components.format = format_ok ? params.r_f : 0.0;
  if (r > 0.0) {
    out.components.accuracy = r;
    out.components.utilization = params.lambda * utilization(t, t_max);
  }
  out.total = out.components.format + out.components.accuracy + out.components.utilization;
  return out;
}

double game_accuracy(std::int64_t s_curr, std::int64_t s_max) {
  if (s_max <= 0) throw InvalidArgument("game_accuracy: max score must be positive");
  const auto clamped = std::clamp<std::int64_t>(s_curr, 0, s_max);
  return std::cbrt(static_cast<double>(clamped) / static_cast<double>(s_max));
}

double ml_accuracy_component(double accuracy) {
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw InvalidArgument("ml accuracy must lie in [0, 1]");
  return 0.5 * accuracy;
}

void to_json(nlohmann::json& j, const RewardParams& params) {
  j = {{"r_f", params.r_f}, {"lambda", params.lambda}, {"task_kind", to_string(params.task_kind)}};
}

void from_json(const nlohmann::json& j, RewardParams& params) {
  const auto kind = task_kind_from_string(detail::optional<std::string>(j, "task_kind", "reasoning", "reward"));
  params = RewardParams::defaults_for(kind);
  params.r_f = detail::optional<double>(j, "r_f", params.r_f, "reward");
  params.lambda = detail::optional<double>(j, "lambda", params.lambda, "reward");
  if (params.r_f < 0.0 || params.lambda < 0.0) throw ValidationError("reward: r_f and lambda must be >= 0");
}

void to_json(nlohmann::json& j, const RewardOutcome& outcome) {
  j = {{"total", outcome.total},
       {"components",
        {{"format", outcome.components.format},
         {"accuracy", outcome.components.accuracy},
         {"utilization", outcome.components.utilization}}},
       {"on_time", outcome.on_time}};
}

void from_json(const nlohmann::json& j, RewardOutcome& outcome) {
  outcome.total = j.at("total").get<double>();
  const auto& c = j.at("components");
  outcome.components = {c.at("format").get<double>(), c.at("accuracy").get<double>(),
                        c.at("utilization").get<double>()};
  outcome.on_time = j.at("on_time").get<bool>();
}

}  // namespace timely
