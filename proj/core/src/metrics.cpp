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

#include "timely/benchkit/metrics.hpp"

#include "timely/timecore/errors.hpp"

namespace timely {

namespace {

template <typename Map>
double mean_of_values(const Map& values, const char* what) {
  if (values.empty()) throw ValidationError(std::string(what) + ": nothing to average");
  double sum = 0.0;
  for (const auto& [_, v] : values) sum += v;
  return sum / static_cast<double>(values.size());
}

}  // namespace

double on_time_rate(const std::vector<SessionResult>& results) {
  if (results.empty()) throw ValidationError("on_time_rate: no results");
  std::size_t on_time = 0;
  for (const auto& r : results) on_time += r.on_time ? 1 : 0;
  return static_cast<double>(on_time) / static_cast<double>(results.size());
}

double on_time_rate(const std::vector<EpisodeRecord>& records) {
  if (records.empty()) throw ValidationError("on_time_rate: no results");
  std::size_t on_time = 0;
  for (const auto& r : records) on_time += r.on_time ? 1 : 0;
  return static_cast<double>(on_time) / static_cast<double>(records.size());
}

double accuracy_over_budgets(const std::map<double, double>& per_budget) {
  return mean_of_values(per_budget, "accuracy_over_budgets");
}

double score_over_settings(const std::map<std::string, double>& per_setting) {
  return mean_of_values(per_setting, "score_over_settings");
}

}  // namespace timely
