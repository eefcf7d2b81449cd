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

#include <filesystem>
#include <string>
#include <vector>

#include "timely/benchkit/runner.hpp"

namespace timely {

enum class ReportFormat { csv, json };

ReportFormat report_format_from_string(const std::string& name);

// Column order of summary.csv; summary.json uses the same keys.
inline constexpr const char* kSummaryColumns[] = {
    "env",       "policy",      "regime",       "budget_multiple", "episodes",
    "mean_score", "mean_reward", "on_time_rate", "mean_steps",      "mean_effective_time_s"};

/// Averages per (env, policy). "over_budgets" is taken within one latency
/// regime; "over_budgets_and_regimes" pools every regime and budget.
struct Rollup {
  std::string env;
  std::string policy;
  std::string regime;  // "*" for the pooled average
  std::string averaging;
  double value = 0.0;
};

std::vector<Rollup> rollups(const std::vector<CellResult>& cells);

std::string summary_csv(const std::vector<CellResult>& cells);
std::string summary_json(const std::vector<CellResult>& cells);
std::string steps_by_budget_csv(const std::vector<CellResult>& cells);
std::string steps_by_budget_json(const std::vector<CellResult>& cells);
std::string rollups_csv(const std::vector<CellResult>& cells);
std::string rollups_json(const std::vector<CellResult>& cells);

// Writes summary, steps_by_budget and rollups files in `format` under
// `dir` and returns their paths.
std::vector<std::filesystem::path> emit_report(const std::vector<CellResult>& cells, ReportFormat format,
                                               const std::filesystem::path& dir);

}  // namespace timely
