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

#include "timely/session/session.hpp"

#include <charconv>
#include <cstdio>

#include "timely/timecore/errors.hpp"

namespace timely {

namespace {

constexpr const char* kGetDuration = "get_duration";
constexpr const char* kStep = "step";
constexpr const char* kGetActions = "get_available_actions";
constexpr const char* kGetScore = "get_score";
constexpr const char* kGetMaxScore = "get_max_score";
constexpr const char* kEndGame = "end_game";
constexpr const char* kExecute = "execute_code_and_get_duration";

std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::to_string(v);
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string env_fingerprint(const EnvironmentRef& env) {
  nlohmann::json doc;
  switch (env.kind) {
    case TaskKind::game: {
      const GameSpec& spec = *env.game;
      doc = {{"name", spec.name()}, {"start", spec.start()}, {"max_score", spec.max_score()}};
      for (const auto& room : spec.rooms()) {
        nlohmann::json r = {{"id", room.id}, {"description", room.description}, {"terminal", room.terminal}};
        for (const auto& t : room.transitions) {
          r["transitions"].push_back(
              {t.action, t.next, t.score_delta, t.message, t.once});
        }
        if (room.best_action) r["best_action"] = *room.best_action;
        doc["rooms"].push_back(std::move(r));
      }
      break;
    }
    case TaskKind::reasoning:
      doc = {{"id", env.reasoning->id},
             {"prompt", env.reasoning->prompt},
             {"ground_truth", env.reasoning->ground_truth},
             {"baseline_x_us", env.reasoning->baseline_x.micros()}};
      break;
    case TaskKind::ml:
      doc = {{"id", env.ml->id}, {"prompt", env.ml->prompt}};
      for (const auto& [key, a] : env.ml->approaches) {
        doc["approaches"].push_back({key, a.accuracy, a.runtime.micros(), a.stdout_text});
      }
      doc["default_on_unknown"] = {env.ml->default_on_unknown.error_text,
                                   env.ml->default_on_unknown.runtime.micros()};
      break;
  }
  return hex64(fnv1a(doc.dump()));
}

const char* family_label(TaskKind kind) {
  switch (kind) {
    case TaskKind::game: return "game";
    case TaskKind::ml: return "machine learning";
    case TaskKind::reasoning: return "reasoning";
  }
  return "reasoning";
}

bool is_game_tool(const std::string& name) {
  return name == kStep || name == kGetActions || name == kGetScore || name == kGetMaxScore || name == kEndGame;
}

}  // namespace

const char* to_string(Observation::Kind kind) noexcept {
  switch (kind) {
    case Observation::Kind::initial: return "initial";
    case Observation::Kind::tool_response: return "tool_response";
    case Observation::Kind::continuation: return "continuation";
  }
  return "initial";
}

void to_json(nlohmann::json& j, const ToolCall& call) {
  j = {{"name", call.name}, {"arguments", call.arguments}};
}

void from_json(const nlohmann::json& j, ToolCall& call) {
  if (!j.is_object() || !j.contains("name") || !j.at("name").is_string()) {
    throw ValidationError("tool call requires a string 'name'");
  }
  call.name = j.at("name").get<std::string>();
  call.arguments = j.contains("arguments") && !j.at("arguments").is_null() ? j.at("arguments")
                                                                           : nlohmann::json::object();
}

EnvironmentRef EnvironmentRef::of(std::shared_ptr<const GameSpec> spec) {
  EnvironmentRef env;
  env.kind = TaskKind::game;
  env.game = std::move(spec);
  return env;
}

EnvironmentRef EnvironmentRef::of(std::shared_ptr<const ReasoningTask> task) {
  EnvironmentRef env;
  env.kind = TaskKind::reasoning;
  env.reasoning = std::move(task);
  return env;
}

EnvironmentRef EnvironmentRef::of(std::shared_ptr<const MLTaskModel> model) {
  EnvironmentRef env;
  env.kind = TaskKind::ml;
  env.ml = std::move(model);
  return env;
}

std::string EnvironmentRef::name() const {
  switch (kind) {
    case TaskKind::game: return game ? game->name() : "";
    case TaskKind::reasoning: return reasoning ? reasoning->id : "";
    case TaskKind::ml: return ml ? ml->id : "";
  }
  return "";
}

void SessionConfig::validate() const {
  const bool env_ok = (env.kind == TaskKind::game && env.game) || (env.kind == TaskKind::reasoning && env.reasoning) ||
                      (env.kind == TaskKind::ml && env.ml);
  if (!env_ok) throw ValidationError("session config: environment is missing for its task kind");
  if (max_steps < 1) throw ValidationError("session config: max_steps must be at least 1");
  if (!(timer.alpha > 0.0)) throw ValidationError("session config: timer alpha must be positive");
  if (reward_params.r_f < 0.0 || reward_params.lambda < 0.0) {
    throw ValidationError("session config: reward r_f and lambda must be non-negative");
  }
  try {
    resolve_budget(budget);
  } catch (const InvalidArgument& e) {
    throw ValidationError(std::string("session config: ") + e.what());
  }
}

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::final_answer: return "final_answer";
    case Termination::env_terminal: return "env_terminal";
    case Termination::budget_exceeded: return "budget_exceeded";
    case Termination::step_cap: return "step_cap";
    case Termination::policy_error: return "policy_error";
  }
  return "policy_error";
}

Termination termination_from_string(const std::string& name) {
  for (auto t : {Termination::final_answer, Termination::env_terminal, Termination::budget_exceeded,
                 Termination::step_cap, Termination::policy_error}) {
    if (name == to_string(t)) return t;
  }
  throw ValidationError("unknown termination '" + name + "'");
}

const char* to_string(TraceEvent::Kind kind) noexcept {
  switch (kind) {
    case TraceEvent::Kind::session_start: return "session_start";
    case TraceEvent::Kind::policy_turn: return "policy_turn";
    case TraceEvent::Kind::tool_call: return "tool_call";
    case TraceEvent::Kind::tool_response: return "tool_response";
    case TraceEvent::Kind::budget_check: return "budget_check";
    case TraceEvent::Kind::session_end: return "session_end";
  }
  return "session_start";
}

nlohmann::json SessionResult::summary() const {
  nlohmann::json j = {
      {"session_id", session_id},
      {"task_kind", to_string(task)},
      {"termination", to_string(termination)},
      {"on_time", on_time},
      {"effective_time_us", effective_time.micros()},
      {"t_max_us", t_max.micros()},
      {"raw_accuracy", raw_accuracy},
      {"reward", reward},
      {"turns", turns},
      {"env_calls_in_budget", env_calls_in_budget},
      {"format_ok", format_ok},
      {"task_score", task_score},
  };
  if (final_score) j["final_score"] = *final_score;
  if (score_in_budget) j["score_in_budget"] = *score_in_budget;
  if (max_score) j["max_score"] = *max_score;
  if (best_accuracy) j["best_accuracy"] = *best_accuracy;
  if (correct) j["correct"] = *correct;
  if (!error.empty()) j["error"] = error;
  return j;
}

std::vector<ToolSchema> tool_schemas(TaskKind kind) {
  const nlohmann::json no_args = {{"type", "object"}, {"properties", nlohmann::json::object()}};
  const ToolSchema timer{kGetDuration, "Gets the total elapsed time (in seconds).", no_args};
  switch (kind) {
    case TaskKind::reasoning:
      return {timer};
    case TaskKind::game:
      return {
          {kStep, "Execute game action.",
           {{"type", "object"},
            {"properties", {{"action", {{"type", "string"}}}}},
            {"required", {"action"}}}},
          {kGetActions, "Get valid moves.", no_args},
          {kGetScore, "Check current score.", no_args},
          {kGetMaxScore, "Check goal score.", no_args},
          {kEndGame, "Terminate session.", no_args},
          timer,
      };
    case TaskKind::ml:
      return {
          {kExecute, "Execute code and return stdout, evaluation accuracy and the time consumed.",
           {{"type", "object"},
            {"properties", {{"code", {{"type", "string"}}}}},
            {"required", {"code"}}}},
          timer,
      };
  }
  return {timer};
}

nlohmann::json tool_schemas_json(TaskKind kind) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& t : tool_schemas(kind)) {
    out.push_back({{"name", t.name}, {"description", t.description}, {"parameters", t.parameters}});
  }
  return out;
}

nlohmann::json session_config_json(const SessionConfig& config) {
  return {
      {"env", {{"kind", to_string(config.env.kind)}, {"name", config.env.name()}, {"fingerprint", env_fingerprint(config.env)}}},
      {"budget", config.budget},
      {"latency", config.latency},
      {"timer", config.timer},
      {"reward", config.reward_params},
      {"max_steps", config.max_steps},
      {"seed", config.seed},
      {"query_latency_us", config.query_latency.micros()},
      {"strict_format", config.strict_format},
  };
}

Session::Session(SessionConfig config, SessionOptions options)
    : config_(std::move(config)), options_(std::move(options)), rng_(config_.seed) {
  config_.validate();
  if (options_.registry) {
    registry_ = options_.registry;
  } else {
    own_registry_ = std::make_unique<TimerRegistry>();
    registry_ = own_registry_.get();
  }
  clock_ = options_.clock ? options_.clock : &virtual_clock_;
  t_max_ = resolve_budget(config_.budget);
  ledger_ = std::make_shared<TimeLedger>();
  registry_->register_session(options_.session_id, config_.timer, ledger_);
  if (config_.env.kind == TaskKind::game) {
    game_ = new_game(*config_.env.game);
    score_in_budget_ = 0;
  }
}

Session::~Session() {
  try {
    registry_->unregister(options_.session_id);
  } catch (const Error&) {
  }
}

Duration Session::effective_time() const {
  return scaled_total(*ledger_, config_.timer.alpha);
}

std::string Session::initial_text() const {
  const std::string limit = format_seconds_2dp(t_max_);
  switch (config_.env.kind) {
    case TaskKind::reasoning:
      return config_.env.reasoning->prompt + "\nPlease answer the question within " + limit + " seconds.";
    case TaskKind::game: {
      const GameSpec& spec = *config_.env.game;
      return "Game started. Observation: " + spec.room(spec.start()).description + " The time limit is " + limit +
             " seconds.";
    }
    case TaskKind::ml:
      return config_.env.ml->prompt + "\nPlease finish the task within " + limit + " seconds.";
  }
  return {};
}

OracleHints Session::oracle_hints() const {
  OracleHints hints;
  switch (config_.env.kind) {
    case TaskKind::game: {
      const GameSpec& spec = *config_.env.game;
      hints.game_ended = game_->ended;
      hints.score = game_->score;
      if (!game_->ended) {
        hints.valid_actions = valid_actions(spec, *game_);
        hints.best_action = spec.room(game_->current).best_action;
        hints.score_reachable = positive_score_reachable(spec, *game_);
      }
      break;
    }
    case TaskKind::reasoning:
      hints.ground_truth = config_.env.reasoning->ground_truth;
      break;
    case TaskKind::ml:
      for (const auto& [key, a] : config_.env.ml->approaches) hints.approach_runtimes.emplace_back(key, a.runtime);
      break;
  }
  return hints;
}

Observation Session::initial_observation(bool with_oracle) {
  Observation obs;
  obs.session_id = options_.session_id;
  obs.seq = 0;
  obs.kind = Observation::Kind::initial;
  obs.task = config_.env.kind;
  obs.text = initial_text();
  obs.time_limit_seconds = t_max_.seconds();
  if (with_oracle) obs.oracle = oracle_hints();
  return obs;
}

ToolResult Session::dispatch_tool(const ToolCall& call, Duration declared_gen) {
  return dispatch(call, declared_gen).result;
}

Session::Dispatched Session::dispatch(const ToolCall& call, Duration declared_gen) {
  Dispatched d;
  const auto fail = [&](const std::string& message) {
    d.result.text = "Error: " + message;
    ledger_->append(declared_gen, Duration::zero());
    return d;
  };
  const auto read_timer = [&] {
    const TimerReading reading = registry_->read(options_.session_id);
    d.reported_us = reading.reported_us;
    return format_seconds_2dp(reading.reported_us);
  };
  const TaskKind family = config_.env.kind;

  if (call.name == kGetDuration) {
    d.result.tool_latency = config_.query_latency;
    ledger_->append(declared_gen, d.result.tool_latency);
    read_timer();
    d.result.text = duration_response_text(*d.reported_us);
    return d;
  }

  if (family == TaskKind::game && is_game_tool(call.name)) {
    const GameSpec& spec = *config_.env.game;
    if (game_->ended) return fail("the game has ended.");
    Duration latency = config_.query_latency;
    if (call.name == kStep) {
      const auto it = call.arguments.find("action");
      if (it == call.arguments.end() || !it->is_string()) return fail("step requires a string argument 'action'.");
      const std::string phrase = normalize_phrase(it->get<std::string>());
      const std::string key = config_.latency.find(phrase) ? phrase : kStep;
      latency = sample_latency(config_.latency, key, rng_);
      auto [next, result] = game_step(spec, *game_, phrase);
      game_ = std::move(next);
      d.result = std::move(result);
      d.env_call = true;
    } else if (call.name == kGetActions) {
      std::string list;
      for (const auto& a : valid_actions(spec, *game_)) list += (list.empty() ? "'" : ", '") + a + "'";
      d.result.text = "Available actions: [" + list + "].";
    } else if (call.name == kGetScore) {
      d.result.text = "Your current score is: " + std::to_string(game_->score) + ".";
    } else if (call.name == kGetMaxScore) {
      d.result.text = "The max score is " + std::to_string(spec.max_score()) + ".";
    } else {
      game_ = end_game(*game_);
      d.result.text = "Game ended. Final score: " + std::to_string(game_->score) + ".";
      d.result.terminal = true;
    }
    d.result.tool_latency = latency;
    ledger_->append(declared_gen, latency);
    d.result.text += " You have played for " + read_timer() + " seconds.";
    return d;
  }

  if (family == TaskKind::ml && call.name == kExecute) {
    const auto it = call.arguments.find("code");
    if (it == call.arguments.end() || !it->is_string()) {
      return fail("execute_code_and_get_duration requires a string argument 'code'.");
    }
    ToolResult result = ml_execute(*config_.env.ml, it->get<std::string>());
    result.tool_latency += sample_latency(config_.latency, kExecute, rng_);
    ledger_->append(declared_gen, result.tool_latency);
    const std::string spent = read_timer();
    if (result.accuracy) {
      best_accuracy_ = std::max(best_accuracy_.value_or(0.0), *result.accuracy);
      result.text = "Code execution succeeded. Stdout: " + result.text + "\nEvaluation accuracy: " +
                    shortest(*result.accuracy) + ". You have spent " + spent + " seconds.";
    } else {
      result.text = "Code execution failed. Error: " + result.text + "\nYou have spent " + spent + " seconds.";
    }
    d.result = std::move(result);
    d.env_call = true;
    return d;
  }

  for (auto other : {TaskKind::reasoning, TaskKind::game, TaskKind::ml}) {
    for (const auto& schema : tool_schemas(other)) {
      if (schema.name == call.name) {
        return fail("tool '" + call.name + "' is not available in " + family_label(family) + " sessions.");
      }
    }
  }
  return fail("unknown tool '" + call.name + "'.");
}

void Session::record(TraceEvent::Kind kind, nlohmann::json payload) {
  trace_.push_back(TraceEvent{kind, std::move(payload), effective_time()});
}

double Session::raw_accuracy() const {
  switch (config_.env.kind) {
    case TaskKind::reasoning:
      return saw_final_tags_ && final_tags_.answer && verify_answer(*config_.env.reasoning, *final_tags_.answer) ? 1.0
                                                                                                               : 0.0;
    case TaskKind::game:
      return game_accuracy(game_->score, config_.env.game->max_score());
    case TaskKind::ml:
      return best_accuracy_.value_or(0.0);
  }
  return 0.0;
}

RewardOutcome Session::finalize() const {
  if (termination_ == Termination::policy_error) return RewardOutcome{};
  const double raw = raw_accuracy();
  double r = 0.0;
  switch (config_.env.kind) {
    case TaskKind::reasoning: r = reasoning_accuracy(raw > 0.0); break;
    case TaskKind::game: r = raw; break;
    case TaskKind::ml: r = ml_accuracy_component(raw); break;
  }
  const bool format_ok = !config_.strict_format || (saw_final_tags_ && final_tags_.conclusion_present);
  return compute_reward(effective_time(), r, t_max_, config_.reward_params, format_ok);
}

SessionResult Session::run(Policy& policy) {
  const bool oracle = policy.wants_oracle();
  Observation obs = initial_observation(oracle);
  record(TraceEvent::Kind::session_start, {{"session_id", options_.session_id},
                                           {"config", session_config_json(config_)},
                                           {"t_max_us", t_max_.micros()},
                                           {"prompt", obs.text},
                                           {"tools", tool_schemas_json(config_.env.kind)},
                                           {"metadata", config_.metadata}});
  std::string error;
  std::size_t turns = 0;

  while (!termination_) {
    PolicyOutput out;
    try {
      out = policy.respond(obs);
    } catch (const std::exception& e) {
      error = e.what();
      termination_ = Termination::policy_error;
      break;
    }
    const ParsedTags tags = parse_tags(out.body);
    nlohmann::json turn = {{"seq", obs.seq},
                           {"turn", turns + 1},
                           {"declared_gen_us", out.declared_gen_time.micros()},
                           {"body", out.body}};
    if (out.tool_call) turn["tool_call"] = *out.tool_call;
    record(TraceEvent::Kind::policy_turn, std::move(turn));

    if (out.tool_call && tags.has_final_construct()) {
      error = "policy turn carries both a tool call and a final answer";
      termination_ = Termination::policy_error;
      break;
    }

    const Duration before = effective_time();
    Dispatched d;
    if (out.tool_call) {
      record(TraceEvent::Kind::tool_call, *out.tool_call);
      d = dispatch(*out.tool_call, out.declared_gen_time);
      nlohmann::json response = {{"name", out.tool_call->name},
                                 {"text", d.result.text},
                                 {"tool_latency_us", d.result.tool_latency.micros()},
                                 {"score_delta", d.result.score_delta},
                                 {"terminal", d.result.terminal}};
      if (d.result.accuracy) response["accuracy"] = *d.result.accuracy;
      if (d.reported_us) response["reported_elapsed_us"] = *d.reported_us;
      record(TraceEvent::Kind::tool_response, std::move(response));
    } else {
      ledger_->append(out.declared_gen_time, Duration::zero());
    }
    ++turns;

    const Duration now = effective_time();
    clock_->advance(now - before);
    const BudgetStatus status = check_budget(now, t_max_);
    record(TraceEvent::Kind::budget_check,
           {{"elapsed_us", now.micros()}, {"t_max_us", t_max_.micros()}, {"status", to_string(status)}});

    if (status == BudgetStatus::exceeded) {
      termination_ = Termination::budget_exceeded;
      break;
    }
    if (d.env_call) ++env_calls_in_budget_;
    if (game_) score_in_budget_ = game_->score;

    if (!out.tool_call && tags.has_final_construct()) {
      final_tags_ = tags;
      saw_final_tags_ = true;
      termination_ = Termination::final_answer;
    } else if (d.result.terminal) {
      termination_ = Termination::env_terminal;
    } else if (turns >= config_.max_steps) {
      termination_ = Termination::step_cap;
    } else {
      Observation next;
      next.session_id = options_.session_id;
      next.seq = obs.seq + 1;
      next.task = config_.env.kind;
      next.turn = turns;
      next.time_limit_seconds = obs.time_limit_seconds;
      if (out.tool_call) {
        next.kind = Observation::Kind::tool_response;
        next.tool_name = out.tool_call->name;
        next.text = d.result.text;
        if (d.reported_us) next.reported_elapsed = static_cast<double>(*d.reported_us) / 1e6;
      } else {
        next.kind = Observation::Kind::continuation;
        next.text = "Continue.";
      }
      if (oracle) next.oracle = oracle_hints();
      obs = std::move(next);
    }
  }

  SessionResult result;
  result.session_id = options_.session_id;
  result.task = config_.env.kind;
  result.ledger = *ledger_;
  result.effective_time = effective_time();
  result.t_max = t_max_;
  result.on_time = check_budget(result.effective_time, t_max_) == BudgetStatus::within;
  result.termination = *termination_;
  result.raw_accuracy = raw_accuracy();
  result.reward = finalize();
  result.turns = turns;
  result.env_calls_in_budget = env_calls_in_budget_;
  result.format_ok = !config_.strict_format || (saw_final_tags_ && final_tags_.conclusion_present);
  result.error = error;
  switch (config_.env.kind) {
    case TaskKind::game:
      result.final_score = game_->score;
      result.score_in_budget = score_in_budget_;
      result.max_score = config_.env.game->max_score();
      result.task_score = static_cast<double>(*score_in_budget_);
      break;
    case TaskKind::reasoning:
      result.correct = result.raw_accuracy > 0.0;
      result.task_score = (*result.correct && result.on_time) ? 1.0 : 0.0;
      break;
    case TaskKind::ml:
      result.best_accuracy = best_accuracy_;
      result.task_score = result.on_time ? best_accuracy_.value_or(0.0) : 0.0;
      break;
  }

  const nlohmann::json summary = result.summary();
  record(TraceEvent::Kind::session_end, summary);
  try {
    policy.on_session_end(summary);
  } catch (const std::exception&) {
    // The episode is already decided; a failing farewell does not change it.
  }
  result.trace = trace_;
  return result;
}

SessionResult run_session(Policy& policy, const SessionConfig& config, SessionOptions options) {
  Session session(config, std::move(options));
  return session.run(policy);
}

Duration replay_effective_time(const std::vector<TraceEvent>& trace, double alpha) {
  TimeLedger ledger;
  Duration gen;
  Duration tool;
  for (const auto& e : trace) {
    switch (e.kind) {
      case TraceEvent::Kind::policy_turn:
        gen = Duration::from_micros(e.payload.at("declared_gen_us").get<std::int64_t>());
        tool = Duration::zero();
        break;
      case TraceEvent::Kind::tool_response:
        tool = Duration::from_micros(e.payload.at("tool_latency_us").get<std::int64_t>());
        break;
      case TraceEvent::Kind::budget_check:
        ledger.append(gen, tool);
        break;
      default:
        break;
    }
  }
  return scaled_total(ledger, alpha);
}

nlohmann::json to_json(const TraceEvent& event) {
  return {{"kind", to_string(event.kind)},
          {"cumulative_effective_time_us", event.cumulative_effective_time.micros()},
          {"payload", event.payload}};
}

TraceEvent trace_event_from_json(const nlohmann::json& j) {
  TraceEvent e;
  const auto kind = j.at("kind").get<std::string>();
  bool known = false;
  for (auto k : {TraceEvent::Kind::session_start, TraceEvent::Kind::policy_turn, TraceEvent::Kind::tool_call,
                 TraceEvent::Kind::tool_response, TraceEvent::Kind::budget_check, TraceEvent::Kind::session_end}) {
    if (kind == to_string(k)) {
      e.kind = k;
      known = true;
    }
  }
  if (!known) throw ValidationError("unknown trace event kind '" + kind + "'");
  e.cumulative_effective_time = Duration::from_micros(j.at("cumulative_effective_time_us").get<std::int64_t>());
  e.payload = j.at("payload");
  return e;
}

std::string serialize_trace(const std::vector<TraceEvent>& trace) {
  std::string out;
  for (const auto& e : trace) {
    out += to_json(e).dump();
    out += '\n';
  }
  return out;
}

std::vector<TraceEvent> parse_trace(std::string_view jsonl) {
  std::vector<TraceEvent> events;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < jsonl.size()) {
    const std::size_t end = std::min(jsonl.find('\n', pos), jsonl.size());
    const std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    try {
      events.push_back(trace_event_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("trace line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
  return events;
}

}  // namespace timely
