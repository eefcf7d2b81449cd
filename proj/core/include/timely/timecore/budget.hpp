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

#include <nlohmann/json.hpp>

#include "timely/timecore/duration.hpp"

namespace timely {

/// How an episode's time limit is derived.
///
/// per_case: baseline duration of this case times a scaling factor.
/// step_based: measured mean step duration times a step multiple.
struct BudgetSpec {
  enum class Kind { per_case, step_based };

  Kind kind = Kind::per_case;
  Duration base;        // baseline x or step time tau
  double factor = 1.0;  // n or k

  static BudgetSpec per_case(Duration baseline_x, double factor_n) {
    return {Kind::per_case, baseline_x, factor_n};
  }
  static BudgetSpec step_based(Duration tau, double multiple_k) {
    return {Kind::step_based, tau, multiple_k};
  }
};

// base * factor rounded to the nearest microsecond, ties away from zero.
// Throws InvalidArgument for non-positive parameters or a zero result.
Duration resolve_budget(const BudgetSpec& spec);

enum class BudgetStatus { within, exceeded };

// The boundary elapsed == t_max is within budget.
constexpr BudgetStatus check_budget(Duration elapsed, Duration t_max) noexcept {
  return elapsed <= t_max ? BudgetStatus::within : BudgetStatus::exceeded;
}

const char* to_string(BudgetStatus status) noexcept;

void to_json(nlohmann::json& j, const BudgetSpec& spec);
void from_json(const nlohmann::json& j, BudgetSpec& spec);

}  // namespace timely
