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

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "timely/benchkit/config.hpp"
#include "timely/session/session.hpp"

namespace timely {

// The parts of a SessionResult that reports aggregate. Recoverable from
// a trace's session_end line.
struct EpisodeRecord {
  std::size_t episode = 0;
  double task_score = 0.0;
  double reward = 0.0;
  bool on_time = false;
  std::size_t turns = 0;
  std::int64_t effective_time_us = 0;
  std::string termination;

  static EpisodeRecord from_result(std::size_t episode, const SessionResult& result);
  static EpisodeRecord from_summary(std::size_t episode, const nlohmann::json& summary);

  friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

struct CellAggregates {
  double mean_score = 0.0;
  double mean_reward = 0.0;
  double on_time_rate = 0.0;
  double mean_steps = 0.0;
  double mean_effective_time_s = 0.0;

  friend bool operator==(const CellAggregates&, const CellAggregates&) = default;
};

CellAggregates aggregate(const std::vector<EpisodeRecord>& episodes);

struct CellResult {
  // Plan indices of (env, policy, regime, budget); reports sort by these.
  std::array<std::size_t, 4> coords{};
  std::string env;
  std::string policy;
  std::string regime;
  double budget_multiple = 1.0;
  std::vector<EpisodeRecord> episodes;
  CellAggregates aggregates;

  friend bool operator==(const CellResult&, const CellResult&) = default;
};

nlohmann::json cell_json(const CellResult& cell);
CellResult cell_from_json(const nlohmann::json& j);

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // traces are written when set
  std::size_t threads = 0;                       // 0: hardware concurrency
  bool real_time = false;
};

// Seed of one episode, a pure function of its coordinates.
std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t env, std::size_t policy, std::size_t regime,
                           std::size_t budget, std::size_t episode) noexcept;

// Runs every cell; the result is sorted by (env, policy, regime, budget)
// in plan order. Writes <out>/traces/<env>/<policy>/<regime>/<budget>/
// episode-NNNN.jsonl and a cell.json per cell.
std::vector<CellResult> run_plan(const ExperimentPlan& plan, const RunOptions& options = {});

std::string budget_label(double multiple);

// Rebuilds cells from a directory of traces written by run_plan.
std::vector<CellResult> load_results(const std::filesystem::path& trace_root);

}  // namespace timely
