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

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "timely/benchkit/config.hpp"
#include "timely/benchkit/report.hpp"
#include "timely/benchkit/runner.hpp"
#include "timely/protocol/scripted.hpp"
#include "timely/protocol/server.hpp"
#include "timely/protocol/transport.hpp"
#include "timely/session/session.hpp"
#include "timely/timecore/errors.hpp"

namespace fs = std::filesystem;
using namespace timely;

namespace {

struct GlobalFlags {
  std::optional<std::uint64_t> seed;
  bool real_time = false;
  std::optional<std::string> out;
  std::string format = "csv";
};

PolicyServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  std::fwrite(text.data(), 1, text.size(), f);
  std::fclose(f);
}

std::unique_ptr<Policy> policy_for_run(const RunConfig& run, const std::string& session_id) {
  if (run.policy.value("kind", "") == "subprocess") {
    const auto argv = run.policy.at("command").get<std::vector<std::string>>();
    nlohmann::json info = {{"session_id", session_id},
                           {"task", to_string(run.session.env.kind)},
                           {"tools", tool_schemas_json(run.session.env.kind)}};
    return std::make_unique<SubprocessPolicy>(argv, session_id, info);
  }
  return make_policy(run.policy, mix_seed(run.session.seed, 2));
}

int cmd_run(const GlobalFlags& g, const std::string& config_path) {
  RunConfig run = load_run_config(config_path);
  if (g.seed) {
    run.session.seed = *g.seed;
    run.session.timer.seed = mix_seed(*g.seed, 1);
  }
  RealClock real;
  SessionOptions opts;
  opts.session_id = "run";
  opts.clock = g.real_time ? &real : nullptr;
  auto policy = policy_for_run(run, opts.session_id);
  const SessionResult result = run_session(*policy, run.session, opts);
  if (g.out) write_text(fs::path(*g.out) / "trace.jsonl", serialize_trace(result.trace));
  std::cout << result.summary().dump(2) << "\n";
  return 0;
}

int cmd_bench(const GlobalFlags& g, const std::string& plan_path, std::size_t threads) {
  ExperimentPlan plan = load_plan(plan_path);
  if (g.seed) plan.base_seed = *g.seed;
  const fs::path out = g.out.value_or("out");
  RunOptions opts{out, threads, g.real_time};
  const auto cells = run_plan(plan, opts);
  for (const auto& path : emit_report(cells, report_format_from_string(g.format), out / "report")) {
    std::cout << path.string() << "\n";
  }
  return 0;
}

int cmd_report(const GlobalFlags& g, const std::string& dir) {
  fs::path root(dir);
  if (fs::is_directory(root / "traces")) root /= "traces";
  const auto cells = load_results(root);
  const fs::path out = g.out ? fs::path(*g.out) : fs::path(dir) / "report";
  for (const auto& path : emit_report(cells, report_format_from_string(g.format), out)) {
    std::cout << path.string() << "\n";
  }
  return 0;
}

std::string detect_kind(const fs::path& path) {
  if (path.extension() == ".jsonl") return "reasoning";
  const nlohmann::json doc = load_config_document(path);
  if (doc.contains("states")) return "game";
  if (doc.contains("approaches")) return "ml";
  if (doc.contains("envs")) return "plan";
  if (doc.contains("env")) return "run";
  throw ValidationError("cannot tell what kind of file this is; pass --kind");
}

int cmd_validate(const std::vector<std::string>& files, const std::string& forced_kind) {
  int failures = 0;
  for (const auto& file : files) {
    try {
      const std::string kind = forced_kind.empty() ? detect_kind(file) : forced_kind;
      std::string detail;
      if (kind == "game") {
        const auto spec = load_game_spec_file(file);
        detail = std::to_string(spec.rooms().size()) + " states, max score " + std::to_string(spec.max_score());
      } else if (kind == "reasoning") {
        const auto tasks = load_reasoning_tasks_file(file);
        for (const auto& t : tasks) {
          if (!verify_answer(t, t.ground_truth)) throw ValidationError("task '" + t.id + "' rejects its own answer");
        }
        detail = std::to_string(tasks.size()) + " tasks";
      } else if (kind == "ml") {
        detail = std::to_string(load_ml_task_file(file).approaches.size()) + " approaches";
      } else if (kind == "plan") {
        const auto plan = load_plan(file);
        detail = std::to_string(plan.envs.size() * plan.policies.size() * plan.latency_regimes.size() *
                                plan.budget_multiples.size()) +
                 " cells";
      } else if (kind == "run") {
        load_run_config(file);
        detail = "run config";
      } else {
        throw ValidationError("unknown kind '" + kind + "'");
      }
      std::cout << "ok " << file << " (" << kind << ": " << detail << ")\n";
    } catch (const std::exception& e) {
      std::cout << "FAIL " << file << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}

int cmd_serve(const GlobalFlags& g, const std::string& config_path, const std::string& host, std::uint16_t port,
              std::size_t max_sessions) {
  const RunConfig base = load_run_config(config_path);
  ServerOptions opts{host, port, max_sessions, g.real_time};
  const std::optional<std::uint64_t> seed = g.seed;
  PolicyServer server(
      [base, seed](std::uint64_t index) {
        SessionConfig config = base.session;
        const std::uint64_t s = mix_seed(seed.value_or(config.seed), index);
        config.seed = mix_seed(s, 0);
        config.timer.seed = mix_seed(s, 1);
        return config;
      },
      opts,
      [&](const SessionResult& result) {
        std::cout << result.summary().dump() << "\n" << std::flush;
        if (g.out) {
          write_text(fs::path(*g.out) / (result.session_id + ".jsonl"), serialize_trace(result.trace));
        }
      });
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cout << "listening on " << host << ":" << server.port() << "\n" << std::flush;
  server.serve();
  g_server = nullptr;
  return 0;
}

int cmd_play(const std::string& policy_text, const std::string& connect, std::uint64_t seed) {
  nlohmann::json spec = fs::exists(policy_text) ? load_config_document(policy_text) : nlohmann::json::parse(policy_text);
  auto policy = make_policy(spec, seed);
  std::unique_ptr<FdChannel> channel;
  if (connect.empty()) {
    channel = std::make_unique<FdChannel>(0, 1, false);
  } else {
    const auto colon = connect.rfind(':');
    if (colon == std::string::npos) throw InvalidArgument("--connect expects host:port");
    channel = std::make_unique<FdChannel>(
        connect_tcp(connect.substr(0, colon), static_cast<std::uint16_t>(std::stoi(connect.substr(colon + 1)))));
  }
  const auto summary = run_policy_client(*policy, *channel);
  std::cerr << summary.dump() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Budgeted agent sessions in virtual time"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  std::uint64_t seed_value = 0;
  app.add_option("--seed", seed_value, "Override the base seed")->each([&](const std::string&) { g.seed = seed_value; });
  app.add_flag("--real-time,!--virtual-time", g.real_time, "Sleep for simulated durations (default: virtual time)");
  std::string out;
  app.add_option("--out", out, "Output directory")->each([&](const std::string& v) { g.out = v; });
  app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

  std::string run_config;
  auto* run = app.add_subcommand("run", "Run one session from a config file and print its result");
  run->add_option("config", run_config, "Run config (JSON or TOML)")->required()->check(CLI::ExistingFile);

  std::string plan_path;
  std::size_t threads = 0;
  auto* bench = app.add_subcommand("bench", "Execute an experiment plan");
  bench->add_option("plan", plan_path, "Plan file (JSON or TOML)")->required()->check(CLI::ExistingFile);
  bench->add_option("--threads", threads, "Worker threads (0: all cores)");

  std::string report_dir;
  auto* report = app.add_subcommand("report", "Aggregate an existing trace directory");
  report->add_option("dir", report_dir, "Bench output or trace directory")->required()->check(CLI::ExistingDirectory);

  std::vector<std::string> files;
  std::string kind;
  auto* validate = app.add_subcommand("validate", "Lint game specs, task files, plans and run configs");
  validate->add_option("files", files, "Files to check")->required();
  validate->add_option("--kind", kind, "game, reasoning, ml, plan or run (default: detect)");

  std::string serve_config;
  std::string host = "127.0.0.1";
  std::uint16_t port = 7345;
  std::size_t max_sessions = 0;
  auto* serve = app.add_subcommand("serve", "Serve sessions to external policies over TCP");
  serve->add_option("config", serve_config, "Run config; its policy entry is ignored")->required()->check(CLI::ExistingFile);
  serve->add_option("--host", host, "IPv4 address to bind");
  serve->add_option("--port", port, "Port to listen on (0: any free port)");
  serve->add_option("--max-sessions", max_sessions, "Exit after this many sessions (0: run until interrupted)");

  std::string play_policy;
  std::string connect;
  auto* play = app.add_subcommand("play", "Act as an external policy client for a scripted policy");
  play->add_option("policy", play_policy, "Policy spec as JSON text or a file")->required();
  play->add_option("--connect", connect, "host:port of a serve process (default: standard streams)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(g, run_config);
    if (*bench) return cmd_bench(g, plan_path, threads);
    if (*report) return cmd_report(g, report_dir);
    if (*validate) return cmd_validate(files, kind);
    if (*serve) return cmd_serve(g, serve_config, host, port, max_sessions);
    if (*play) return cmd_play(play_policy, connect, g.seed.value_or(0));
  } catch (const std::exception& e) {
    std::cerr << "timely: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
