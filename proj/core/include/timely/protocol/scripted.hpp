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

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "timely/session/policy.hpp"
#include "timely/timecore/rng.hpp"

namespace timely {

/// Game agent with a fixed turn time and decision quality q. With
/// probability q it takes the annotated best action, otherwise a uniformly
/// chosen other action; it ends the game once no score is left to gain.
class SyntheticGamePolicy final : public Policy {
 public:
  SyntheticGamePolicy(Duration gen_time, double quality_q, std::uint64_t seed);

  PolicyOutput respond(const Observation& observation) override;
  bool wants_oracle() const override { return true; }

 private:
  Duration gen_time_;
  double q_;
  SeededRng rng_;
};

/// Alternates get_duration probes with task actions and concludes when the
/// last probe shows the budget nearly spent.
///
/// It stops at the first probe where reported >= (1 - margin) * T, or
/// where one more action/probe cycle plus the concluding turn might not
/// fit (reported + 1.5 * cycle > T, cycle being the last probe-to-probe
/// gap).
class BudgetAwarePolicy final : public Policy {
 public:
  BudgetAwarePolicy(Duration gen_time, double safety_margin);

  PolicyOutput respond(const Observation& observation) override;
  bool wants_oracle() const override { return true; }

 private:
  PolicyOutput probe() const;
  PolicyOutput task_action(const Observation& obs);
  PolicyOutput conclude(const Observation& obs) const;

  Duration gen_time_;
  double margin_;
  std::optional<double> last_probe_;
  std::optional<double> cycle_;
  std::size_t task_actions_ = 0;
  std::size_t next_approach_ = 0;
  std::optional<double> best_accuracy_;
};

/// Plays a fixed list of outputs in order. When the list runs out it
/// either starts over or throws PolicyError.
class FixedScriptPolicy final : public Policy {
 public:
  FixedScriptPolicy(std::vector<PolicyOutput> script, bool loop);

  PolicyOutput respond(const Observation& observation) override;

 private:
  std::vector<PolicyOutput> script_;
  bool loop_;
  std::size_t next_ = 0;
};

/// Submits ML approaches in ladder order while the next one still fits,
/// then reports the best accuracy seen.
class MLLadderPolicy final : public Policy {
 public:
  // No `ladder` means the task's own approach order; an empty one concludes at once.
  MLLadderPolicy(Duration gen_time, std::optional<std::vector<std::string>> ladder = std::nullopt);

  PolicyOutput respond(const Observation& observation) override;
  bool wants_oracle() const override { return true; }

 private:
  Duration gen_time_;
  std::optional<std::vector<std::string>> configured_;
  std::vector<std::pair<std::string, Duration>> ladder_;
  std::size_t next_ = 0;
  double elapsed_ = 0.0;
  std::optional<double> best_;
};

// Reads "Evaluation accuracy: X" from an ML tool response.
std::optional<double> parse_reported_accuracy(const std::string& text);

std::string conclusion_tag(double seconds);

// Builds a policy from its JSON spec, e.g.
//   {"kind": "synthetic_game", "gen_time_us": 1000000, "quality_q": 0.6}
//   {"kind": "budget_aware", "gen_time_us": 1000000, "safety_margin": 0.2}
//   {"kind": "ml_ladder", "gen_time_us": 2000000, "ladder": ["a", "b"]}
//   {"kind": "fixed_script", "loop": true, "script": [{"declared_gen_time_us": 0,
//     "body": "", "tool_call": {"name": "step", "arguments": {"action": "xyzzy"}}}]}
// `seed` feeds policies that draw random numbers.
std::unique_ptr<Policy> make_policy(const nlohmann::json& spec, std::uint64_t seed);
void validate_policy_spec(const nlohmann::json& spec);

}  // namespace timely
