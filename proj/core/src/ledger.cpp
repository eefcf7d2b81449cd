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

#include "timely/timecore/ledger.hpp"

#include "timely/timecore/errors.hpp"

namespace timely {

void TimeLedger::append(Duration t_gen, Duration t_tool) {
  // Checked before mutation so a failed append leaves the ledger intact.
  [[maybe_unused]] const Duration total = total_time(*this) + t_gen + t_tool;
  steps_.push_back(StepRecord{steps_.size() + 1, t_gen, t_tool});
}

Duration TimeLedger::total_gen() const {
  Duration sum;
  for (const auto& s : steps_) sum += s.t_gen;
  return sum;
}

Duration TimeLedger::total_tool() const {
  Duration sum;
  for (const auto& s : steps_) sum += s.t_tool;
  return sum;
}

TimeLedger ledger_append(TimeLedger ledger, Duration t_gen, Duration t_tool) {
  ledger.append(t_gen, t_tool);
  return ledger;
}

Duration total_time(const TimeLedger& ledger) {
  return ledger.total_gen() + ledger.total_tool();
}

std::optional<double> latency_ratio(const StepRecord& step) {
  if (step.t_gen.is_zero()) return std::nullopt;
  return static_cast<double>(step.t_tool.micros()) / static_cast<double>(step.t_gen.micros());
}

__extension__ using i128 = __int128;

Duration weighted_total(const TimeLedger& ledger) {
  Duration sum;
  for (const auto& s : ledger.steps()) {
    if (s.t_gen.is_zero()) {
      sum += s.t_tool;
      continue;
    }
    // ratio = tool/gen as a fraction; (ratio + 1) * gen = (tool + gen) * gen / gen.
    const i128 num = static_cast<i128>(s.t_tool.micros()) + s.t_gen.micros();
    const i128 den = s.t_gen.micros();
    const i128 step_total = num * s.t_gen.micros() / den;
    if (step_total > INT64_MAX) throw OverflowError("weighted_total overflow");
    sum += Duration::from_micros(static_cast<std::int64_t>(step_total));
  }
  return sum;
}

std::int64_t predicted_rounds(Duration budget, Duration mean_tool) {
  if (mean_tool.is_zero()) throw InvalidArgument("predicted_rounds: mean tool latency must be positive");
  return budget.micros() / mean_tool.micros();
}

Duration scaled_total(const TimeLedger& ledger, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
  return scale(ledger.total_gen(), alpha) + ledger.total_tool();
}

}  // namespace timely
