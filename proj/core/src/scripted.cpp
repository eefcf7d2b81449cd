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

#include "timely/protocol/scripted.hpp"

#include <charconv>
#include <cmath>
#include <regex>

#include "json_util.hpp"
#include "timely/protocol/wire.hpp"
#include "timely/timecore/errors.hpp"

namespace timely {

namespace {

std::string shortest(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::to_string(v);
}

const OracleHints& require_oracle(const Observation& obs, const char* who) {
  if (!obs.oracle) throw PolicyError(std::string(who) + " needs fixture hints, which this session does not provide");
  return *obs.oracle;
}

PolicyOutput call(Duration gen, std::string body, std::string name, nlohmann::json args = nlohmann::json::object()) {
  return PolicyOutput{gen, std::move(body), ToolCall{std::move(name), std::move(args)}};
}

Duration gen_from(const nlohmann::json& spec) {
  return detail::require_duration(spec, "gen_time_us", "policy spec");
}

}  // namespace

std::optional<double> parse_reported_accuracy(const std::string& text) {
  static const std::regex kAccuracy(R"(Evaluation accuracy: ([0-9]+(?:\.[0-9]+)?(?:[eE][-+]?[0-9]+)?))");
  std::smatch m;
  if (!std::regex_search(text, m, kAccuracy)) return std::nullopt;
  double v = 0.0;
  const std::string s = m[1].str();
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc()) return std::nullopt;
  return v;
}

std::string conclusion_tag(double seconds) {
  const auto us = static_cast<std::int64_t>(std::llround(std::max(seconds, 0.0) * 1e6));
  return "<conclusion>total duration: " + format_seconds_2dp(us) + " seconds</conclusion>";
}

SyntheticGamePolicy::SyntheticGamePolicy(Duration gen_time, double quality_q, std::uint64_t seed)
    : gen_time_(gen_time), q_(quality_q), rng_(seed) {
  if (!(q_ >= 0.0 && q_ <= 1.0)) throw InvalidArgument("quality_q must lie in [0, 1]");
}

PolicyOutput SyntheticGamePolicy::respond(const Observation& obs) {
  const OracleHints& hints = require_oracle(obs, "synthetic_game");
  if (!hints.score_reachable || hints.valid_actions.empty()) return call(gen_time_, "", "end_game");

  std::vector<std::string> others;
  for (const auto& a : hints.valid_actions) {
    if (!hints.best_action || a != *hints.best_action) others.push_back(a);
  }
  std::string action;
  if (hints.best_action) {
    const bool take_best = rng_.bernoulli(q_);
    action = (take_best || others.empty()) ? *hints.best_action : others[rng_.index(others.size())];
  } else {
    action = others[rng_.index(others.size())];
  }
  return call(gen_time_, "", "step", {{"action", action}});
}

BudgetAwarePolicy::BudgetAwarePolicy(Duration gen_time, double safety_margin)
    : gen_time_(gen_time), margin_(safety_margin) {
  if (!(margin_ > 0.0 && margin_ < 1.0)) throw InvalidArgument("safety_margin must lie in (0, 1)");
}

PolicyOutput BudgetAwarePolicy::probe() const { return call(gen_time_, "", "get_duration"); }

PolicyOutput BudgetAwarePolicy::respond(const Observation& obs) {
  if (obs.kind == Observation::Kind::tool_response && obs.tool_name == "get_duration") {
    const double reported = obs.reported_elapsed.value_or(0.0);
    cycle_ = last_probe_ ? reported - *last_probe_ : 2.0 * reported;
    last_probe_ = reported;
    const double limit = obs.time_limit_seconds;
    if (reported >= (1.0 - margin_) * limit || reported + 1.5 * *cycle_ > limit) return conclude(obs);
    return task_action(obs);
  }
  if (obs.kind == Observation::Kind::tool_response) {
    if (auto acc = parse_reported_accuracy(obs.text)) best_accuracy_ = std::max(best_accuracy_.value_or(0.0), *acc);
  }
  return probe();
}

PolicyOutput BudgetAwarePolicy::task_action(const Observation& obs) {
  const OracleHints& hints = require_oracle(obs, "budget_aware");
  ++task_actions_;
  switch (obs.task) {
    case TaskKind::game:
      if (!hints.score_reachable || !hints.best_action) return conclude(obs);
      return call(gen_time_, "", "step", {{"action", *hints.best_action}});
    case TaskKind::ml:
      if (next_approach_ >= hints.approach_runtimes.size()) return conclude(obs);
      return call(gen_time_, "", "execute_code_and_get_duration",
                  {{"code", "#approach: " + hints.approach_runtimes[next_approach_++].first + "\n"}});
    case TaskKind::reasoning:
      return PolicyOutput{gen_time_, "Working through the problem, step " + std::to_string(task_actions_) + ".", {}};
  }
  return probe();
}

PolicyOutput BudgetAwarePolicy::conclude(const Observation& obs) const {
  const OracleHints& hints = require_oracle(obs, "budget_aware");
  std::string body = "<summary>Stopping after " + std::to_string(task_actions_) +
                     " task actions to stay within the time limit.</summary>\n" +
                     conclusion_tag(last_probe_.value_or(0.0)) + "\n";
  switch (obs.task) {
    case TaskKind::reasoning:
      body += "<answer>\\boxed{" + hints.ground_truth.value_or("") + "}</answer>";
      break;
    case TaskKind::game:
      body += "<score>" + std::to_string(hints.score) + "</score>";
      break;
    case TaskKind::ml:
      body += "<accuracy>" + shortest(best_accuracy_.value_or(0.0)) + "</accuracy>";
      break;
  }
  return PolicyOutput{gen_time_, std::move(body), {}};
}

FixedScriptPolicy::FixedScriptPolicy(std::vector<PolicyOutput> script, bool loop)
    : script_(std::move(script)), loop_(loop) {
  if (loop_ && script_.empty()) throw InvalidArgument("a looping script needs at least one output");
}

PolicyOutput FixedScriptPolicy::respond(const Observation&) {
  if (next_ >= script_.size()) {
    if (!loop_) throw PolicyError("fixed script exhausted after " + std::to_string(script_.size()) + " outputs");
    next_ = 0;
  }
  return script_[next_++];
}

MLLadderPolicy::MLLadderPolicy(Duration gen_time, std::optional<std::vector<std::string>> ladder)
    : gen_time_(gen_time), configured_(std::move(ladder)) {}

PolicyOutput MLLadderPolicy::respond(const Observation& obs) {
  if (obs.kind == Observation::Kind::initial) {
    const OracleHints& hints = require_oracle(obs, "ml_ladder");
    ladder_.clear();
    if (configured_) {
      for (const auto& key : *configured_) {
        Duration runtime;
        for (const auto& [k, r] : hints.approach_runtimes) {
          if (k == key) runtime = r;
        }
        ladder_.emplace_back(key, runtime);
      }
    } else {
      ladder_ = hints.approach_runtimes;
    }
    next_ = 0;
    elapsed_ = 0.0;
    best_.reset();
  } else if (obs.kind == Observation::Kind::tool_response) {
    elapsed_ = obs.reported_elapsed.value_or(elapsed_);
    if (auto acc = parse_reported_accuracy(obs.text)) best_ = std::max(best_.value_or(0.0), *acc);
  }

  const double gen = gen_time_.seconds();
  if (next_ < ladder_.size()) {
    const double runtime = ladder_[next_].second.seconds();
    if (elapsed_ + gen + runtime + gen <= obs.time_limit_seconds) {
      return call(gen_time_, "", "execute_code_and_get_duration",
                  {{"code", "#approach: " + ladder_[next_++].first + "\n"}});
    }
  }
  std::string body = "<summary>Submitted " + std::to_string(next_) + " approaches.</summary>\n" +
                     conclusion_tag(elapsed_) + "\n<accuracy>" + shortest(best_.value_or(0.0)) + "</accuracy>";
  return PolicyOutput{gen_time_, std::move(body), {}};
}

void validate_policy_spec(const nlohmann::json& spec) { make_policy(spec, 0); }

std::unique_ptr<Policy> make_policy(const nlohmann::json& spec, std::uint64_t seed) {
  const auto kind = detail::require<std::string>(spec, "kind", "policy spec");
  try {
    if (kind == "synthetic_game") {
      return std::make_unique<SyntheticGamePolicy>(gen_from(spec), detail::require<double>(spec, "quality_q", "policy spec"),
                                                   seed);
    }
    if (kind == "budget_aware") {
      return std::make_unique<BudgetAwarePolicy>(gen_from(spec),
                                                 detail::optional<double>(spec, "safety_margin", 0.2, "policy spec"));
    }
    if (kind == "ml_ladder") {
      std::optional<std::vector<std::string>> ladder;
      if (spec.contains("ladder")) ladder = detail::require<std::vector<std::string>>(spec, "ladder", "policy spec");
      return std::make_unique<MLLadderPolicy>(gen_from(spec), std::move(ladder));
    }
    if (kind == "fixed_script") {
      std::vector<PolicyOutput> script;
      for (const auto& item : detail::require<nlohmann::json>(spec, "script", "policy spec")) {
        script.push_back(policy_output_from_payload(item));
      }
      return std::make_unique<FixedScriptPolicy>(std::move(script),
                                                 detail::optional<bool>(spec, "loop", false, "policy spec"));
    }
  } catch (const InvalidArgument& e) {
    throw ValidationError(std::string("policy spec: ") + e.what());
  } catch (const ProtocolError& e) {
    throw ValidationError(std::string("policy spec script: ") + e.what());
  }
  throw ValidationError("policy spec: unknown kind '" + kind + "'");
}

}  // namespace timely
