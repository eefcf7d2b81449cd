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
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "timely/reward/reward.hpp"
#include "timely/timecore/duration.hpp"

namespace timely {

struct ToolCall {
  std::string name;
  nlohmann::json arguments = nlohmann::json::object();

  friend bool operator==(const ToolCall&, const ToolCall&) = default;
};

/// One policy turn. `declared_gen_time` is the simulated generation latency
/// of the turn; the session scales it by the timer alpha.
struct PolicyOutput {
  Duration declared_gen_time;
  std::string body;
  std::optional<ToolCall> tool_call;

  friend bool operator==(const PolicyOutput&, const PolicyOutput&) = default;
};

// Fixture knowledge handed only to in-process scripted policies. It is
// never serialized onto the wire.
struct OracleHints {
  std::vector<std::string> valid_actions;
  std::optional<std::string> best_action;
  bool score_reachable = false;
  bool game_ended = false;
  std::int64_t score = 0;
  std::optional<std::string> ground_truth;
  std::vector<std::pair<std::string, Duration>> approach_runtimes;  // fixture order
};

struct Observation {
  enum class Kind { initial, tool_response, continuation };

  std::string session_id;
  std::uint64_t seq = 0;
  Kind kind = Kind::initial;
  TaskKind task = TaskKind::reasoning;
  std::size_t turn = 0;  // policy turns completed so far
  std::string text;
  std::optional<std::string> tool_name;    // set for tool responses
  double time_limit_seconds = 0.0;
  std::optional<double> reported_elapsed;  // timer reading shown in `text`, if any
  std::optional<OracleHints> oracle;
};

const char* to_string(Observation::Kind kind) noexcept;

/// A decision maker driven by the session loop.
///
/// respond() may throw PolicyError (or any std::exception); the session
/// records that as a policy_error termination.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual PolicyOutput respond(const Observation& observation) = 0;

  // Scripted policies opt in to fixture hints.
  virtual bool wants_oracle() const { return false; }

  virtual void on_session_end(const nlohmann::json& /*summary*/) {}
};

void to_json(nlohmann::json& j, const ToolCall& call);
void from_json(const nlohmann::json& j, ToolCall& call);

}  // namespace timely
