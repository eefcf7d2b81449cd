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

#include <map>
#include <string>
#include <vector>

#include "timely/benchkit/runner.hpp"
#include "timely/session/session.hpp"

namespace timely {

// Fraction of episodes finishing within budget. Empty input throws
// ValidationError, as do the averages below.
double on_time_rate(const std::vector<SessionResult>& results);
double on_time_rate(const std::vector<EpisodeRecord>& records);

// Unweighted mean over budget multiples.
double accuracy_over_budgets(const std::map<double, double>& per_budget);

// Unweighted mean over settings.
double score_over_settings(const std::map<std::string, double>& per_setting);

}  // namespace timely
