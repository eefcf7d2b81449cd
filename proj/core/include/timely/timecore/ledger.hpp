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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "timely/timecore/duration.hpp"

namespace timely {

/// One agent step: the generation time of the turn and the latency of the
/// tool call it issued (zero for turns without a tool call).
struct StepRecord {
  std::size_t index = 1;
  Duration t_gen;
  Duration t_tool;

  friend bool operator==(const StepRecord&, const StepRecord&) = default;
};

/// Ordered per-step time records for one episode.
///
/// Steps are indexed 1..N without gaps. Totals are always recomputed from
/// the steps; nothing is cached.
class TimeLedger {
 public:
  TimeLedger() = default;

  // Appends step N+1. Throws OverflowError if the episode total would no
  // longer fit in a Duration; the ledger is unchanged in that case.
  void append(Duration t_gen, Duration t_tool);

  const std::vector<StepRecord>& steps() const noexcept { return steps_; }
  std::size_t size() const noexcept { return steps_.size(); }
  bool empty() const noexcept { return steps_.empty(); }

  Duration total_gen() const;
  Duration total_tool() const;

  friend bool operator==(const TimeLedger&, const TimeLedger&) = default;

 private:
  std::vector<StepRecord> steps_;
};

// Value-returning append: the input ledger is left untouched.
TimeLedger ledger_append(TimeLedger ledger, Duration t_gen, Duration t_tool);

// Sum of generation and tool time over every step.
Duration total_time(const TimeLedger& ledger);

// Per-step tool/generation latency ratio. Empty when t_gen is zero, where
// the ratio is undefined.
std::optional<double> latency_ratio(const StepRecord& step);

// Total recomputed step-wise as (ratio + 1) * t_gen with the ratio kept as
// an exact fraction. Steps with zero generation time contribute their tool
// time directly. Always equal to total_time.
Duration weighted_total(const TimeLedger& ledger);

// Rounds that fit in `budget` when each costs `mean_tool`, floored.
// Throws InvalidArgument when mean_tool is zero.
std::int64_t predicted_rounds(Duration budget, Duration mean_tool);

// alpha * sum(t_gen) + sum(t_tool), the generation part rounded to the
// nearest microsecond. This is the effective session time.
Duration scaled_total(const TimeLedger& ledger, double alpha);

}  // namespace timely
