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

#include "timely/benchkit/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "io_util.hpp"
#include "json_util.hpp"
#include "timely/protocol/scripted.hpp"
#include "timely/timecore/errors.hpp"

namespace timely {

namespace fs = std::filesystem;

std::filesystem::path fixture_dir() {
  if (const char* env = std::getenv("TIMELY_FIXTURE_DIR"); env && *env) return env;
  return TIMELY_FIXTURE_DIR;
}

nlohmann::json parse_toml(std::string_view text) {
  toml::table table;
  try {
    table = toml::parse(text);
  } catch (const toml::parse_error& e) {
    const auto& where = e.source().begin;
    throw ParseError(std::string("toml: ") + std::string(e.description()) + " at line " + std::to_string(where.line) +
                         ", column " + std::to_string(where.column),
                     where.line);
  }
  std::ostringstream out;
  out << toml::json_formatter{table};
  return nlohmann::json::parse(out.str());
}

nlohmann::json load_config_document(const fs::path& path) {
  const std::string text = detail::read_file(path.string());
  if (path.extension() == ".toml") return parse_toml(text);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what(), e.byte);
  }
}

fs::path resolve_data_path(const std::string& path, const fs::path& base_dir) {
  const fs::path p(path);
  if (p.is_absolute()) return p;
  if (fs::exists(base_dir / p)) return base_dir / p;
  if (fs::exists(fixture_dir() / p)) return fixture_dir() / p;
  throw IoError("cannot find '" + path + "' relative to '" + base_dir.string() + "' or the fixture directory");
}

BudgetSpec LoadedEnv::budget_for(std::size_t episode, double multiple) const {
  if (kind == TaskKind::reasoning) return BudgetSpec::per_case(instance_for(episode).reasoning->baseline_x, multiple);
  return BudgetSpec::step_based(*tau, multiple);
}

namespace {

LoadedEnv load_env_entry(const nlohmann::json& entry, const fs::path& base_dir, bool require_tau) {
  LoadedEnv env;
  env.kind = task_kind_from_string(detail::require<std::string>(entry, "kind", "env"));
  const auto path_text = detail::require<std::string>(entry, "path", "env");
  const fs::path path = resolve_data_path(path_text, base_dir);
  env.name = detail::optional<std::string>(entry, "name", path.stem().string(), "env");
  if (entry.contains("tau_us")) env.tau = detail::require_duration(entry, "tau_us", "env '" + env.name + "'");

  switch (env.kind) {
    case TaskKind::game:
      env.instances.push_back(EnvironmentRef::of(std::make_shared<const GameSpec>(load_game_spec_file(path.string()))));
      break;
    case TaskKind::ml:
      env.instances.push_back(EnvironmentRef::of(std::make_shared<const MLTaskModel>(load_ml_task_file(path.string()))));
      break;
    case TaskKind::reasoning:
      for (auto& task : load_reasoning_tasks_file(path.string())) {
        env.instances.push_back(EnvironmentRef::of(std::make_shared<const ReasoningTask>(std::move(task))));
      }
      break;
  }
  if (env.instances.empty()) throw ValidationError("env '" + env.name + "' has no tasks");
  if (require_tau && env.kind != TaskKind::reasoning && (!env.tau || env.tau->is_zero())) {
    throw ValidationError("env '" + env.name + "' needs a positive tau_us for step-based budgets");
  }
  return env;
}

}  // namespace

LoadedEnv load_env(const nlohmann::json& entry, const fs::path& base_dir) {
  return load_env_entry(entry, base_dir, true);
}

std::vector<LatencyRegime> standard_latency_regimes() {
  return {
      {"none", LatencyModel::none()},
      {"low", LatencyModel::fixed(Duration::from_seconds(2))},
      {"medium", LatencyModel::fixed(Duration::from_seconds(10))},
      {"high", LatencyModel::fixed(Duration::from_seconds(50))},
  };
}

void ExperimentPlan::validate() const {
  if (envs.empty()) throw ValidationError("plan '" + name + "': envs must be non-empty");
  if (policies.empty()) throw ValidationError("plan '" + name + "': policies must be non-empty");
  if (latency_regimes.empty()) throw ValidationError("plan '" + name + "': latency_regimes must be non-empty");
  if (budget_multiples.empty()) throw ValidationError("plan '" + name + "': budget_multiples must be non-empty");
  if (episodes_per_cell == 0) throw ValidationError("plan '" + name + "': episodes_per_cell must be positive");
  if (max_steps == 0) throw ValidationError("plan '" + name + "': max_steps must be positive");
  if (!(alpha > 0.0)) throw ValidationError("plan '" + name + "': timer alpha must be positive");
  for (double m : budget_multiples) {
    if (!(m > 0.0)) throw ValidationError("plan '" + name + "': budget multiples must be positive");
  }
  for (const auto& p : policies) validate_policy_spec(p.spec);
  const auto unique = [&](auto get, const char* what) {
    std::set<std::string> seen;
    for (const auto& name_ : get()) {
      if (!seen.insert(name_).second) {
        throw ValidationError("plan '" + name + "': duplicate " + what + " name '" + name_ + "'");
      }
    }
  };
  unique([&] { std::vector<std::string> v; for (const auto& e : envs) v.push_back(e.name); return v; }, "env");
  unique([&] { std::vector<std::string> v; for (const auto& p : policies) v.push_back(p.name); return v; }, "policy");
  unique([&] { std::vector<std::string> v; for (const auto& r : latency_regimes) v.push_back(r.name); return v; },
         "latency regime");
}

ExperimentPlan plan_from_json(const nlohmann::json& doc, const fs::path& base_dir) {
  ExperimentPlan plan;
  plan.name = detail::optional<std::string>(doc, "name", "plan", "plan");
  const std::string where = "plan '" + plan.name + "'";

  for (const auto& entry : detail::require<nlohmann::json>(doc, "envs", where)) {
    try {
      plan.envs.push_back(load_env(entry, base_dir));
    } catch (const Error& e) {
      throw ValidationError(where + ": env " + entry.dump() + ": " + e.what());
    }
  }
  for (const auto& entry : detail::require<nlohmann::json>(doc, "policies", where)) {
    PolicyEntry p;
    p.name = detail::require<std::string>(entry, "name", where + " policy");
    p.spec = entry.contains("policy") ? entry.at("policy") : entry;
    plan.policies.push_back(std::move(p));
  }
  const auto regimes = detail::require<nlohmann::json>(doc, "latency_regimes", where);
  if (regimes.is_string()) {
    if (regimes.get<std::string>() != "standard") throw ValidationError(where + ": unknown regime set " + regimes.dump());
    plan.latency_regimes = standard_latency_regimes();
  } else {
    for (const auto& entry : regimes) {
      plan.latency_regimes.push_back({detail::require<std::string>(entry, "name", where + " regime"),
                                      detail::require<LatencyModel>(entry, "latency", where + " regime")});
    }
  }
  plan.budget_multiples = detail::require<std::vector<double>>(doc, "budget_multiples", where);
  const auto episodes = detail::require<std::int64_t>(doc, "episodes_per_cell", where);
  if (episodes <= 0) throw ValidationError(where + ": episodes_per_cell must be positive");
  plan.episodes_per_cell = static_cast<std::size_t>(episodes);
  plan.base_seed = detail::optional<std::uint64_t>(doc, "base_seed", 0, where);

  if (doc.contains("timer")) {
    const auto& t = doc.at("timer");
    plan.alpha = detail::optional<double>(t, "alpha", 1.0, where + " timer");
    if (t.contains("jitter")) plan.jitter = detail::require<JitterModel>(t, "jitter", where + " timer");
  }
  if (doc.contains("reward")) {
    plan.r_f = detail::optional<double>(doc.at("reward"), "r_f", 0.1, where + " reward");
    plan.lambda = detail::optional<double>(doc.at("reward"), "lambda", 0.4, where + " reward");
  }
  plan.max_steps = detail::optional<std::size_t>(doc, "max_steps", 200, where);
  plan.query_latency = detail::optional_duration(doc, "query_latency_us", plan.query_latency, where);
  plan.strict_format = detail::optional<bool>(doc, "strict_format", false, where);
  plan.validate();
  return plan;
}

ExperimentPlan load_plan(const fs::path& path) {
  return plan_from_json(load_config_document(path), path.parent_path());
}

RunConfig run_config_from_json(const nlohmann::json& doc, const fs::path& base_dir) {
  const std::string where = "run config";
  const auto env_entry = detail::require<nlohmann::json>(doc, "env", where);
  const LoadedEnv env = load_env_entry(env_entry, base_dir, false);
  std::size_t index = 0;
  if (env_entry.contains("task")) {
    const auto& task = env_entry.at("task");
    if (task.is_number_unsigned() || task.is_number_integer()) {
      index = task.get<std::size_t>();
      if (index >= env.instances.size()) throw ValidationError(where + ": task index out of range");
    } else {
      const auto id = task.get<std::string>();
      const auto it = std::find_if(env.instances.begin(), env.instances.end(),
                                   [&](const EnvironmentRef& r) { return r.name() == id; });
      if (it == env.instances.end()) throw ValidationError(where + ": no task '" + id + "'");
      index = static_cast<std::size_t>(it - env.instances.begin());
    }
  }

  RunConfig run;
  SessionConfig& s = run.session;
  s.env = env.instances[index];
  nlohmann::json budget = detail::require<nlohmann::json>(doc, "budget", where);
  if (budget.is_object() && budget.value("kind", "") == "per_case" && !budget.contains("baseline_x_us") &&
      s.env.kind == TaskKind::reasoning) {
    budget["baseline_x_us"] = s.env.reasoning->baseline_x.micros();
  }
  if (budget.is_object() && budget.value("kind", "") == "step_based" && !budget.contains("tau_us") && env.tau) {
    budget["tau_us"] = env.tau->micros();
  }
  s.budget = budget.get<BudgetSpec>();
  if (doc.contains("latency")) s.latency = doc.at("latency").get<LatencyModel>();
  if (doc.contains("timer")) s.timer = doc.at("timer").get<TimerConfig>();
  s.reward_params = RewardParams::defaults_for(s.env.kind);
  if (doc.contains("reward")) {
    s.reward_params.r_f = detail::optional<double>(doc.at("reward"), "r_f", 0.1, where + " reward");
    s.reward_params.lambda = detail::optional<double>(doc.at("reward"), "lambda", 0.4, where + " reward");
  }
  s.max_steps = detail::optional<std::size_t>(doc, "max_steps", s.max_steps, where);
  s.seed = detail::optional<std::uint64_t>(doc, "seed", 0, where);
  s.query_latency = detail::optional_duration(doc, "query_latency_us", s.query_latency, where);
  s.strict_format = detail::optional<bool>(doc, "strict_format", false, where);
  s.validate();
  run.policy = detail::require<nlohmann::json>(doc, "policy", where);
  if (run.policy.value("kind", "") != "subprocess") validate_policy_spec(run.policy);
  return run;
}

RunConfig load_run_config(const fs::path& path) {
  return run_config_from_json(load_config_document(path), path.parent_path());
}

}  // namespace timely
