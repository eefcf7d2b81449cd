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

#include "timely/benchkit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>

#include "io_util.hpp"
#include "timely/benchkit/metrics.hpp"
#include "timely/timecore/errors.hpp"

namespace timely {

namespace fs = std::filesystem;

namespace {

// Every reported number goes through this text form, so the CSV and JSON
// files carry the same values.
std::string number_text(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

nlohmann::json number(double v) { return nlohmann::json::parse(number_text(v)); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void require_cells(const std::vector<CellResult>& cells) {
  if (cells.empty()) throw ValidationError("report: no results");
}

}  // namespace

ReportFormat report_format_from_string(const std::string& name) {
  if (name == "csv") return ReportFormat::csv;
  if (name == "json") return ReportFormat::json;
  throw ValidationError("unknown report format '" + name + "' (expected csv or json)");
}

std::vector<Rollup> rollups(const std::vector<CellResult>& cells) {
  // (env, policy) -> regime -> budget -> score, in first-seen order of cells.
  std::vector<std::pair<std::string, std::string>> order;
  std::map<std::pair<std::string, std::string>, std::vector<std::string>> regimes;
  std::map<std::tuple<std::string, std::string, std::string>, std::map<double, double>> per_budget;
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> per_setting;
  for (const auto& c : cells) {
    const auto ep = std::make_pair(c.env, c.policy);
    if (!regimes.contains(ep)) order.push_back(ep);
    auto& rs = regimes[ep];
    if (std::find(rs.begin(), rs.end(), c.regime) == rs.end()) rs.push_back(c.regime);
    per_budget[{c.env, c.policy, c.regime}][c.budget_multiple] = c.aggregates.mean_score;
    per_setting[ep][c.regime + "/" + budget_label(c.budget_multiple)] = c.aggregates.mean_score;
  }
  std::vector<Rollup> out;
  for (const auto& ep : order) {
    for (const auto& regime : regimes[ep]) {
      out.push_back({ep.first, ep.second, regime, "over_budgets",
                     accuracy_over_budgets(per_budget[{ep.first, ep.second, regime}])});
    }
    out.push_back({ep.first, ep.second, "*", "over_budgets_and_regimes", score_over_settings(per_setting[ep])});
  }
  return out;
}

std::string summary_csv(const std::vector<CellResult>& cells) {
  require_cells(cells);
  std::string out;
  for (std::size_t i = 0; i < std::size(kSummaryColumns); ++i) out += (i ? "," : "") + std::string(kSummaryColumns[i]);
  out += '\n';
  for (const auto& c : cells) {
    const auto& a = c.aggregates;
    out += csv_field(c.env) + "," + csv_field(c.policy) + "," + csv_field(c.regime) + "," +
           number_text(c.budget_multiple) + "," + std::to_string(c.episodes.size()) + "," + number_text(a.mean_score) +
           "," + number_text(a.mean_reward) + "," + number_text(a.on_time_rate) + "," + number_text(a.mean_steps) + "," +
           number_text(a.mean_effective_time_s) + "\n";
  }
  return out;
}

std::string summary_json(const std::vector<CellResult>& cells) {
  require_cells(cells);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    const auto& a = c.aggregates;
    rows.push_back({{"env", c.env},
                    {"policy", c.policy},
                    {"regime", c.regime},
                    {"budget_multiple", number(c.budget_multiple)},
                    {"episodes", c.episodes.size()},
                    {"mean_score", number(a.mean_score)},
                    {"mean_reward", number(a.mean_reward)},
                    {"on_time_rate", number(a.on_time_rate)},
                    {"mean_steps", number(a.mean_steps)},
                    {"mean_effective_time_s", number(a.mean_effective_time_s)}});
  }
  return rows.dump(2) + "\n";
}

std::string steps_by_budget_csv(const std::vector<CellResult>& cells) {
  require_cells(cells);
  std::string out = "env,policy,regime,budget_multiple,mean_steps\n";
  for (const auto& c : cells) {
    out += csv_field(c.env) + "," + csv_field(c.policy) + "," + csv_field(c.regime) + "," +
           number_text(c.budget_multiple) + "," + number_text(c.aggregates.mean_steps) + "\n";
  }
  return out;
}

std::string steps_by_budget_json(const std::vector<CellResult>& cells) {
  require_cells(cells);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    rows.push_back({{"env", c.env},
                    {"policy", c.policy},
                    {"regime", c.regime},
                    {"budget_multiple", number(c.budget_multiple)},
                    {"mean_steps", number(c.aggregates.mean_steps)}});
  }
  return rows.dump(2) + "\n";
}

std::string rollups_csv(const std::vector<CellResult>& cells) {
  require_cells(cells);
  std::string out = "env,policy,regime,averaging,mean_score\n";
  for (const auto& r : rollups(cells)) {
    out += csv_field(r.env) + "," + csv_field(r.policy) + "," + csv_field(r.regime) + "," + r.averaging + "," +
           number_text(r.value) + "\n";
  }
  return out;
}

std::string rollups_json(const std::vector<CellResult>& cells) {
  require_cells(cells);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : rollups(cells)) {
    rows.push_back({{"env", r.env},
                    {"policy", r.policy},
                    {"regime", r.regime},
                    {"averaging", r.averaging},
                    {"mean_score", number(r.value)}});
  }
  return rows.dump(2) + "\n";
}

std::vector<fs::path> emit_report(const std::vector<CellResult>& cells, ReportFormat format, const fs::path& dir) {
  require_cells(cells);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  const bool csv = format == ReportFormat::csv;
  const std::string ext = csv ? ".csv" : ".json";
  const std::vector<std::pair<std::string, std::string>> files = {
      {"summary" + ext, csv ? summary_csv(cells) : summary_json(cells)},
      {"steps_by_budget" + ext, csv ? steps_by_budget_csv(cells) : steps_by_budget_json(cells)},
      {"rollups" + ext, csv ? rollups_csv(cells) : rollups_json(cells)},
  };
  std::vector<fs::path> written;
  for (const auto& [name, contents] : files) {
    detail::write_file((dir / name).string(), contents);
    written.push_back(dir / name);
  }
  return written;
}

}  // namespace timely
