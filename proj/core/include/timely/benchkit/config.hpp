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
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "timely/session/session.hpp"

namespace timely {

// Directory holding the bundled fixtures. TIMELY_FIXTURE_DIR in the
// environment overrides the compiled-in location.
std::filesystem::path fixture_dir();

// Reads a JSON or TOML (by ".toml" extension) config file into one JSON
// document. Both formats share every schema.
nlohmann::json load_config_document(const std::filesystem::path& path);
nlohmann::json parse_toml(std::string_view text);

// Relative paths are tried against `base_dir`, then the fixture directory.
std::filesystem::path resolve_data_path(const std::string& path, const std::filesystem::path& base_dir);

/// One environment of a plan, loaded. A reasoning file holds many tasks;
/// episode e of a cell plays task e mod n.
struct LoadedEnv {
  std::string name;
  TaskKind kind = TaskKind::reasoning;
  std::vector<EnvironmentRef> instances;
  std::optional<Duration> tau;  // step time for game and ML budgets

  // Budget for one episode at `multiple`.
  BudgetSpec budget_for(std::size_t episode, double multiple) const;
  const EnvironmentRef& instance_for(std::size_t episode) const { return instances[episode % instances.size()]; }
};

// {"kind": "game"|"reasoning"|"ml", "path": "...", "name"?: "...", "tau_us"?: n}
LoadedEnv load_env(const nlohmann::json& entry, const std::filesystem::path& base_dir);

struct PolicyEntry {
  std::string name;
  nlohmann::json spec;  // see make_policy
};

struct LatencyRegime {
  std::string name;
  LatencyModel model;
};

// none, low (2s), medium (10s), high (50s), all fixed.
std::vector<LatencyRegime> standard_latency_regimes();

/// A grid of (env, policy, latency regime, budget multiple) cells, each run
/// for episodes_per_cell seeded episodes.
struct ExperimentPlan {
  std::string name = "plan";
  std::vector<LoadedEnv> envs;
  std::vector<PolicyEntry> policies;
  std::vector<LatencyRegime> latency_regimes;
  std::vector<double> budget_multiples;
  std::size_t episodes_per_cell = 1;
  std::uint64_t base_seed = 0;

  double alpha = 1.0;
  JitterModel jitter;
  double r_f = 0.1;
  double lambda = 0.4;
  std::size_t max_steps = 200;
  Duration query_latency = Duration::from_micros(500'000);
  bool strict_format = false;

  void validate() const;
};

ExperimentPlan plan_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
ExperimentPlan load_plan(const std::filesystem::path& path);

/// The config of a single `run`: one environment instance, one policy.
struct RunConfig {
  SessionConfig session;
  nlohmann::json policy;  // make_policy spec, or {"kind": "subprocess", "command": [...]}
};

// Schema: {"env": {...load_env entry, "task"?: id or index}, "budget": BudgetSpec
// (per_case may omit baseline_x_us to use the task's), "latency", "timer",
// "reward", "max_steps", "seed", "query_latency_us", "strict_format", "policy"}.
RunConfig run_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace timely
