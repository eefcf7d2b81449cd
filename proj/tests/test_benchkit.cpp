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

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "test_support.hpp"
#include "timely/benchkit/config.hpp"
#include "timely/benchkit/metrics.hpp"
#include "timely/benchkit/report.hpp"
#include "timely/benchkit/runner.hpp"
#include "timely/timecore/errors.hpp"

namespace timely {
namespace {

namespace fs = std::filesystem;
using timely::testing::config_path;
using timely::testing::TempDir;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Relative path -> content for every regular file below `root`.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  }
  return out;
}

const char* kSmallPlan = R"({
  "name": "small",
  "envs": [{"kind": "game", "path": "games/mini-zork.json", "tau_us": 1000000}],
  "policies": [
    {"name": "fast", "kind": "synthetic_game", "gen_time_us": 1000000, "quality_q": 0.6},
    {"name": "aware", "kind": "budget_aware", "gen_time_us": 1000000, "safety_margin": 0.2}
  ],
  "latency_regimes": "standard",
  "budget_multiples": [20],
  "episodes_per_cell": 8,
  "base_seed": 42
})";

ExperimentPlan small_plan() { return plan_from_json(nlohmann::json::parse(kSmallPlan), fixture_dir()); }

TEST(Runner, GridWritesOneTracePerEpisode) {
  TempDir tmp;
  const auto cells = run_plan(small_plan(), RunOptions{tmp.path(), 4, false});
  ASSERT_EQ(cells.size(), 8u);
  std::size_t traces = 0, cell_files = 0;
  for (const auto& e : fs::recursive_directory_iterator(tmp.path() / "traces")) {
    if (!e.is_regular_file()) continue;
    if (e.path().filename() == "cell.json") {
      ++cell_files;
    } else if (e.path().extension() == ".jsonl") {
      ++traces;
    }
  }
  EXPECT_EQ(traces, 64u);
  EXPECT_EQ(cell_files, 8u);
  EXPECT_TRUE(fs::exists(tmp.path() / "traces/mini-zork/aware/high/x20/episode-0007.jsonl"));
  // Plan order: env, then policy, then regime, then budget.
  EXPECT_EQ(cells[0].policy, "fast");
  EXPECT_EQ(cells[0].regime, "none");
  EXPECT_EQ(cells[3].regime, "high");
  EXPECT_EQ(cells[4].policy, "aware");
}

TEST(Runner, SameSeedSameBytesAcrossThreadCounts) {
  TempDir a, b;
  const auto plan = small_plan();
  const auto ca = run_plan(plan, RunOptions{a.path(), 1, false});
  const auto cb = run_plan(plan, RunOptions{b.path(), 8, false});
  EXPECT_EQ(ca, cb);
  emit_report(ca, ReportFormat::csv, a.path() / "report");
  emit_report(cb, ReportFormat::csv, b.path() / "report");
  EXPECT_EQ(snapshot(a.path()), snapshot(b.path()));
}

TEST(Runner, SeedsDifferAcrossCoordinates) {
  std::set<std::uint64_t> seeds;
  for (std::size_t e = 0; e < 3; ++e)
    for (std::size_t p = 0; p < 3; ++p)
      for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t k = 0; k < 5; ++k)
          for (std::size_t i = 0; i < 8; ++i) seeds.insert(episode_seed(1, e, p, r, k, i));
  EXPECT_EQ(seeds.size(), 3u * 3 * 4 * 5 * 8);
  EXPECT_EQ(episode_seed(1, 0, 0, 0, 0, 0), episode_seed(1, 0, 0, 0, 0, 0));
  EXPECT_NE(episode_seed(1, 0, 0, 0, 0, 0), episode_seed(2, 0, 0, 0, 0, 0));
}

TEST(Runner, AggregatesRecomputableFromTraces) {
  TempDir tmp;
  const auto cells = run_plan(small_plan(), RunOptions{tmp.path(), 0, false});
  const auto loaded = load_results(tmp.path() / "traces");
  ASSERT_EQ(loaded.size(), cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    EXPECT_EQ(loaded[i].episodes, cells[i].episodes);
    EXPECT_EQ(aggregate(loaded[i].episodes), cells[i].aggregates);
    // Independent recomputation straight from the session_end lines.
    double score = 0, on_time = 0;
    const auto dir = tmp.path() / "traces" / cells[i].env / cells[i].policy / cells[i].regime /
                     budget_label(cells[i].budget_multiple);
    for (std::size_t e = 0; e < 8; ++e) {
      char name[32];
      std::snprintf(name, sizeof name, "episode-%04zu.jsonl", e);
      const auto trace = parse_trace(slurp(dir / name));
      const auto& end = trace.back().payload;
      score += end.at("task_score").get<double>();
      on_time += end.at("on_time").get<bool>() ? 1 : 0;
    }
    EXPECT_DOUBLE_EQ(cells[i].aggregates.mean_score, score / 8);
    EXPECT_DOUBLE_EQ(cells[i].aggregates.on_time_rate, on_time / 8);
  }
}

TEST(Plan, ValidationErrors) {
  auto doc = nlohmann::json::parse(kSmallPlan);
  doc["episodes_per_cell"] = 0;
  EXPECT_THROW(plan_from_json(doc, fixture_dir()), ValidationError);
  doc = nlohmann::json::parse(kSmallPlan);
  doc["policies"] = nlohmann::json::array();
  EXPECT_THROW(plan_from_json(doc, fixture_dir()), ValidationError);
  doc = nlohmann::json::parse(kSmallPlan);
  doc["envs"][0].erase("tau_us");
  EXPECT_THROW(plan_from_json(doc, fixture_dir()), ValidationError);
  doc = nlohmann::json::parse(kSmallPlan);
  doc["budget_multiples"] = {0.0};
  EXPECT_THROW(plan_from_json(doc, fixture_dir()), ValidationError);
}

TEST(Plan, TomlAndJsonAgree) {
  TempDir tmp;
  const auto json_path = tmp.path() / "plan.json";
  const auto toml_path = tmp.path() / "plan.toml";
  std::ofstream(json_path) << kSmallPlan;
  std::ofstream(toml_path) << R"(name = "small"
latency_regimes = "standard"
budget_multiples = [20]
episodes_per_cell = 8
base_seed = 42

[[envs]]
kind = "game"
path = "games/mini-zork.json"
tau_us = 1000000

[[policies]]
name = "fast"
kind = "synthetic_game"
gen_time_us = 1000000
quality_q = 0.6

[[policies]]
name = "aware"
kind = "budget_aware"
gen_time_us = 1000000
safety_margin = 0.2
)";
  EXPECT_EQ(load_config_document(toml_path), load_config_document(json_path));
  const auto a = run_plan(load_plan(toml_path), RunOptions{std::nullopt, 2, false});
  const auto b = run_plan(load_plan(json_path), RunOptions{std::nullopt, 2, false});
  EXPECT_EQ(a, b);
}

TEST(Plan, BundledConfigsLoad) {
  for (const char* name : {"regime_flip.json", "budget_scaling.toml", "ml_ladder.json", "on_time.json"}) {
    EXPECT_NO_THROW(load_plan(config_path(name))) << name;
  }
  for (const char* name : {"run_reasoning.json", "run_zork.toml"}) {
    EXPECT_NO_THROW(load_run_config(config_path(name))) << name;
  }
}

TEST(Metrics, Examples) {
  std::vector<EpisodeRecord> records(4);
  records[0].on_time = records[1].on_time = records[2].on_time = true;
  EXPECT_DOUBLE_EQ(on_time_rate(records), 0.75);
  EXPECT_THROW(on_time_rate(std::vector<EpisodeRecord>{}), ValidationError);
  EXPECT_DOUBLE_EQ(accuracy_over_budgets({{1.0, 0.2}, {2.0, 0.4}, {3.0, 0.9}}), 0.5);
  EXPECT_DOUBLE_EQ(score_over_settings({{"none", 10}, {"high", 20}}), 15.0);
  EXPECT_THROW(accuracy_over_budgets({}), ValidationError);
}

CellResult cell(std::size_t p, std::size_t r, std::size_t b, double score) {
  CellResult c;
  c.coords = {0, p, r, b};
  c.env = "g";
  c.policy = p ? "slow" : "fast";
  c.regime = r ? "high" : "none";
  c.budget_multiple = b + 1.0;
  EpisodeRecord e;
  e.task_score = score;
  e.turns = 3;
  c.episodes = {e};
  c.aggregates = aggregate(c.episodes);
  return c;
}

TEST(Report, EightRowsAndStableBytes) {
  std::vector<CellResult> cells;
  for (std::size_t p = 0; p < 2; ++p)
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t b = 0; b < 2; ++b) cells.push_back(cell(p, r, b, 10.0 * (p + 1) + r + b));
  const auto csv = summary_csv(cells);
  std::istringstream lines(csv);
  std::string header, row;
  std::getline(lines, header);
  EXPECT_EQ(header,
            "env,policy,regime,budget_multiple,episodes,mean_score,mean_reward,on_time_rate,mean_steps,"
            "mean_effective_time_s");
  std::size_t rows = 0;
  while (std::getline(lines, row)) ++rows;
  EXPECT_EQ(rows, 8u);

  TempDir a, b;
  emit_report(cells, ReportFormat::csv, a.path());
  emit_report(cells, ReportFormat::csv, b.path());
  EXPECT_EQ(snapshot(a.path()), snapshot(b.path()));
  EXPECT_EQ(snapshot(a.path()).size(), 3u);
}

TEST(Report, CsvAndJsonCarrySameNumbers) {
  std::vector<CellResult> cells{cell(0, 0, 0, 1.0 / 3.0), cell(1, 1, 1, 2.5)};
  const auto json = nlohmann::json::parse(summary_json(cells));
  ASSERT_EQ(json.size(), 2u);
  std::istringstream lines(summary_csv(cells));
  std::string header, row;
  std::getline(lines, header);
  for (const auto& obj : json) {
    std::getline(lines, row);
    std::vector<std::string> fields;
    std::stringstream ss(row);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
    ASSERT_EQ(fields.size(), std::size(kSummaryColumns));
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const auto& v = obj.at(kSummaryColumns[i]);
      if (v.is_string()) {
        EXPECT_EQ(fields[i], v.get<std::string>());
      } else {
        EXPECT_DOUBLE_EQ(std::stod(fields[i]), v.get<double>()) << kSummaryColumns[i];
      }
    }
  }
}

TEST(Report, RollupsMatchHandAverages) {
  std::vector<CellResult> cells;
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t b = 0; b < 2; ++b) cells.push_back(cell(0, r, b, 1.0 + r * 10 + b));
  // Scores: none {1, 2}, high {11, 12}.
  std::map<std::pair<std::string, std::string>, double> got;
  for (const auto& r : rollups(cells)) got[{r.regime, r.averaging}] = r.value;
  EXPECT_DOUBLE_EQ((got[{"none", "over_budgets"}]), 1.5);
  EXPECT_DOUBLE_EQ((got[{"high", "over_budgets"}]), 11.5);
  EXPECT_DOUBLE_EQ((got[{"*", "over_budgets_and_regimes"}]), 6.5);
}

TEST(Config, RunConfigFillsTaskDefaults) {
  const auto rc = load_run_config(config_path("run_reasoning.json"));
  EXPECT_EQ(rc.session.env.kind, TaskKind::reasoning);
  EXPECT_TRUE(rc.policy.contains("kind"));
  EXPECT_NO_THROW(rc.session.validate());
}

}  // namespace
}  // namespace timely
