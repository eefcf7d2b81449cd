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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "timely/envsim/game.hpp"
#include "timely/envsim/mltask.hpp"
#include "timely/envsim/reasoning.hpp"
#include "timely/reward/reward.hpp"
#include "timely/session/clock.hpp"
#include "timely/session/policy.hpp"
#include "timely/session/tags.hpp"
#include "timely/timecore/budget.hpp"
#include "timely/timecore/latency.hpp"
#include "timely/timecore/ledger.hpp"
#include "timely/timerlink/timer.hpp"

namespace timely {

// The task world of one session. Specs are immutable and may be shared by
// any number of sessions.
struct EnvironmentRef {
  TaskKind kind = TaskKind::reasoning;
  std::shared_ptr<const GameSpec> game;
  std::shared_ptr<const ReasoningTask> reasoning;
  std::shared_ptr<const MLTaskModel> ml;

  static EnvironmentRef of(std::shared_ptr<const GameSpec> spec);
  static EnvironmentRef of(std::shared_ptr<const ReasoningTask> task);
  static EnvironmentRef of(std::shared_ptr<const MLTaskModel> model);

  std::string name() const;
};

struct SessionConfig {
  EnvironmentRef env;
  BudgetSpec budget;
  LatencyModel latency;
  TimerConfig timer;
  RewardParams reward_params;
  std::size_t max_steps = 200;
  std::uint64_t seed = 0;
  // Latency of query-only tools: get_score, get_available_actions,
  // get_max_score, get_duration, end_game.
  Duration query_latency = Duration::from_micros(500'000);
  // Withhold r_f unless the final turn carries a <conclusion> tag.
  bool strict_format = false;
  // Free-form data copied into the session_start trace event.
  nlohmann::json metadata = nlohmann::json::object();

  // Throws ValidationError describing the first invalid field.
  void validate() const;
};

enum class Termination { final_answer, env_terminal, budget_exceeded, step_cap, policy_error };

const char* to_string(Termination t) noexcept;
Termination termination_from_string(const std::string& name);

struct TraceEvent {
  enum class Kind { session_start, policy_turn, tool_call, tool_response, budget_check, session_end };

  Kind kind = Kind::session_start;
  nlohmann::json payload = nlohmann::json::object();
  Duration cumulative_effective_time;
};

const char* to_string(TraceEvent::Kind kind) noexcept;

struct SessionResult {
  std::string session_id;
  TaskKind task = TaskKind::reasoning;
  TimeLedger ledger;
  Duration effective_time;
  Duration t_max;
  bool on_time = false;
  Termination termination = Termination::policy_error;
  double raw_accuracy = 0.0;
  RewardOutcome reward;
  std::vector<TraceEvent> trace;

  std::size_t turns = 0;
  // Environment tool calls (step, code execution) that finished within
  // the budget.
  std::size_t env_calls_in_budget = 0;
  std::optional<std::int64_t> final_score;     // games
  std::optional<std::int64_t> score_in_budget;  // games: score as of the last on-time step
  std::optional<std::int64_t> max_score;        // games
  std::optional<double> best_accuracy;          // ml
  std::optional<bool> correct;                  // reasoning
  bool format_ok = true;
  std::string error;
  // Per-episode task metric used by reports: in-budget game score,
  // on-time correctness for reasoning, on-time best accuracy for ML.
  double task_score = 0.0;

  // The record written to the session_end trace event.
  nlohmann::json summary() const;
};

struct ToolSchema {
  std::string name;
  std::string description;
  nlohmann::json parameters;
};

// Tools visible to a policy for a task family, in a stable order.
std::vector<ToolSchema> tool_schemas(TaskKind kind);
nlohmann::json tool_schemas_json(TaskKind kind);

struct SessionOptions {
  std::string session_id = "session";
  TimerRegistry* registry = nullptr;  // a private registry is used when null
  Clock* clock = nullptr;             // virtual time when null
};

/// The budgeted agent/environment loop for one episode.
///
/// Each policy turn becomes one ledger step: its declared generation time
/// plus the latency of the tool it called. The budget is checked after
/// every completed step; there is no preemption inside a step.
class Session {
 public:
  explicit Session(SessionConfig config, SessionOptions options = {});
  ~Session();
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  const SessionConfig& config() const noexcept { return config_; }
  const std::string& id() const noexcept { return options_.session_id; }
  Duration t_max() const noexcept { return t_max_; }
  const TimeLedger& ledger() const noexcept { return *ledger_; }
  Duration effective_time() const;

  Observation initial_observation(bool with_oracle);

  // Runs one tool call issued by a turn that took `declared_gen` and
  // appends the step to the ledger. Unknown tools and bad arguments
  // produce an error response, not an exception.
  ToolResult dispatch_tool(const ToolCall& call, Duration declared_gen);

  SessionResult run(Policy& policy);

  // Reward for the episode as it stands.
  RewardOutcome finalize() const;

 private:
  struct Dispatched {
    ToolResult result;
    std::optional<std::int64_t> reported_us;
    bool env_call = false;
  };

  Dispatched dispatch(const ToolCall& call, Duration declared_gen);
  std::string initial_text() const;
  OracleHints oracle_hints() const;
  double raw_accuracy() const;
  void record(TraceEvent::Kind kind, nlohmann::json payload);

  SessionConfig config_;
  SessionOptions options_;
  std::unique_ptr<TimerRegistry> own_registry_;
  TimerRegistry* registry_;
  VirtualClock virtual_clock_;
  Clock* clock_;
  SeededRng rng_;
  Duration t_max_;
  std::shared_ptr<TimeLedger> ledger_;

  std::optional<GameState> game_;
  std::optional<std::int64_t> score_in_budget_;
  std::optional<double> best_accuracy_;
  std::size_t env_calls_in_budget_ = 0;
  ParsedTags final_tags_;
  bool saw_final_tags_ = false;
  std::optional<Termination> termination_;
  std::vector<TraceEvent> trace_;
};

SessionResult run_session(Policy& policy, const SessionConfig& config, SessionOptions options = {});

nlohmann::json session_config_json(const SessionConfig& config);

// Replays the per-turn generation and tool times recorded in a trace into a
// fresh ledger and returns the effective time.
Duration replay_effective_time(const std::vector<TraceEvent>& trace, double alpha);

nlohmann::json to_json(const TraceEvent& event);
TraceEvent trace_event_from_json(const nlohmann::json& j);
// One JSON document per line, '\n'-terminated.
std::string serialize_trace(const std::vector<TraceEvent>& trace);
std::vector<TraceEvent> parse_trace(std::string_view jsonl);

}  // namespace timely
