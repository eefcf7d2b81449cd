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

#include "timely/timecore/budget.hpp"

#include "json_util.hpp"

namespace timely {

Duration resolve_budget(const BudgetSpec& spec) {
  if (spec.base.is_zero()) throw InvalidArgument("budget base duration must be positive");
  if (!(spec.factor > 0.0)) throw InvalidArgument("budget factor must be positive");
  const Duration t_max = scale(spec.base, spec.factor);
  if (t_max.is_zero()) throw InvalidArgument("resolved budget rounds to zero");
  return t_max;
}

const char* to_string(BudgetStatus status) noexcept {
  return status == BudgetStatus::within ? "within" : "exceeded";
}

void to_json(nlohmann::json& j, const BudgetSpec& spec) {
  if (spec.kind == BudgetSpec::Kind::per_case) {
    j = {{"kind", "per_case"}, {"baseline_x_us", spec.base.micros()}, {"factor_n", spec.factor}};
  } else {
    j = {{"kind", "step_based"}, {"tau_us", spec.base.micros()}, {"multiple_k", spec.factor}};
  }
}

void from_json(const nlohmann::json& j, BudgetSpec& spec) {
  const auto kind = detail::require<std::string>(j, "kind", "budget");
  if (kind == "per_case") {
    spec = BudgetSpec::per_case(detail::require_duration(j, "baseline_x_us", "per_case budget"),
                                detail::require<double>(j, "factor_n", "per_case budget"));
  } else if (kind == "step_based") {
    spec = BudgetSpec::step_based(detail::require_duration(j, "tau_us", "step_based budget"),
                                  detail::require<double>(j, "multiple_k", "step_based budget"));
  } else {
    throw ValidationError("unknown budget kind '" + kind + "'");
  }
}

}  // namespace timely
