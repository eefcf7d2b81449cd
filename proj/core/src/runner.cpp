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

#include "timely/benchkit/runner.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <mutex>
#include <cstdio>
#include <thread>

#include "io_util.hpp"
#include "json_util.hpp"
#include "timely/protocol/scripted.hpp"
#include "timely/timecore/errors.hpp"
#include "timely/timecore/rng.hpp"

namespace timely {

namespace fs = std::filesystem;

namespace {

std::string episode_file(std::size_t episode) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "episode-%04zu.jsonl", episode);
  return buf;
}

struct Job {
  std::size_t cell;
  std::size_t env, policy, regime, budget, episode;
};

}  // namespace

EpisodeRecord EpisodeRecord::from_result(std::size_t episode, const SessionResult& result) {
  EpisodeRecord r;
  r.episode = episode;
  r.task_score = result.task_score;
  r.reward = result.reward.total;
  r.on_time = result.on_time;
  r.turns = result.turns;
  r.effective_time_us = result.effective_time.micros();
  r.termination = to_string(result.termination);
  return r;
}

EpisodeRecord EpisodeRecord::from_summary(std::size_t episode, const nlohmann::json& summary) {
  const std::string where = "session summary";
  EpisodeRecord r;
  r.episode = episode;
  r.task_score = detail::require<double>(summary, "task_score", where);
  r.reward = detail::require<double>(detail::require<nlohmann::json>(summary, "reward", where), "total", where);
  r.on_time = detail::require<bool>(summary, "on_time", where);
  r.turns = detail::require<std::size_t>(summary, "turns", where);
  r.effective_time_us = detail::require<std::int64_t>(summary, "effective_time_us", where);
  r.termination = detail::require<std::string>(summary, "termination", where);
  return r;
}

CellAggregates aggregate(const std::vector<EpisodeRecord>& episodes) {
  if (episodes.empty()) throw ValidationError("cannot aggregate an empty cell");
  CellAggregates a;
  double score = 0, reward = 0, on_time = 0, steps = 0, time = 0;
  for (const auto& e : episodes) {
    score += e.task_score;
    reward += e.reward;
    on_time += e.on_time ? 1.0 : 0.0;
    steps += static_cast<double>(e.turns);
    time += static_cast<double>(e.effective_time_us) / 1e6;
  }
  const auto n = static_cast<double>(episodes.size());
  a.mean_score = score / n;
  a.mean_reward = reward / n;
  a.on_time_rate = on_time / n;
  a.mean_steps = steps / n;
  a.mean_effective_time_s = time / n;
  return a;
}

nlohmann::json cell_json(const CellResult& cell) {
  nlohmann::json episodes = nlohmann::json::array();
  for (const auto& e : cell.episodes) {
    episodes.push_back({{"episode", e.episode},
                        {"task_score", e.task_score},
                        {"reward", e.reward},
                        {"on_time", e.on_time},
                        {"turns", e.turns},
                        {"effective_time_us", e.effective_time_us},
                        {"termination", e.termination}});
  }
  const auto& a = cell.aggregates;
  return {{"coords", cell.coords},
          {"env", cell.env},
          {"policy", cell.policy},
          {"regime", cell.regime},
          {"budget_multiple", cell.budget_multiple},
          {"episodes", episodes},
          {"aggregates",
           {{"mean_score", a.mean_score},
            {"mean_reward", a.mean_reward},
            {"on_time_rate", a.on_time_rate},
            {"mean_steps", a.mean_steps},
            {"mean_effective_time_s", a.mean_effective_time_s}}}};
}

CellResult cell_from_json(const nlohmann::json& j) {
  const std::string where = "cell";
  CellResult c;
  c.coords = detail::require<std::array<std::size_t, 4>>(j, "coords", where);
  c.env = detail::require<std::string>(j, "env", where);
  c.policy = detail::require<std::string>(j, "policy", where);
  c.regime = detail::require<std::string>(j, "regime", where);
  c.budget_multiple = detail::require<double>(j, "budget_multiple", where);
  for (const auto& e : detail::require<nlohmann::json>(j, "episodes", where)) {
    EpisodeRecord r;
    r.episode = detail::require<std::size_t>(e, "episode", where);
    r.task_score = detail::require<double>(e, "task_score", where);
    r.reward = detail::require<double>(e, "reward", where);
    r.on_time = detail::require<bool>(e, "on_time", where);
    r.turns = detail::require<std::size_t>(e, "turns", where);
    r.effective_time_us = detail::require<std::int64_t>(e, "effective_time_us", where);
    r.termination = detail::require<std::string>(e, "termination", where);
    c.episodes.push_back(std::move(r));
  }
  const auto& a = detail::require<nlohmann::json>(j, "aggregates", where);
  c.aggregates = {detail::require<double>(a, "mean_score", where), detail::require<double>(a, "mean_reward", where),
                  detail::require<double>(a, "on_time_rate", where), detail::require<double>(a, "mean_steps", where),
                  detail::require<double>(a, "mean_effective_time_s", where)};
  return c;
}

std::uint64_t episode_seed(std::uint64_t base_seed, std::size_t env, std::size_t policy, std::size_t regime,
                           std::size_t budget, std::size_t episode) noexcept {
  std::uint64_t s = base_seed;
  for (std::uint64_t coord : {env, policy, regime, budget, episode}) s = mix_seed(s, coord);
  return s;
}

std::string budget_label(double multiple) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "x%g", multiple);
  return buf;
}

std::vector<CellResult> run_plan(const ExperimentPlan& plan, const RunOptions& options) {
  plan.validate();
  std::vector<CellResult> cells;
  std::vector<Job> jobs;
  for (std::size_t e = 0; e < plan.envs.size(); ++e) {
    for (std::size_t p = 0; p < plan.policies.size(); ++p) {
      for (std::size_t r = 0; r < plan.latency_regimes.size(); ++r) {
        for (std::size_t b = 0; b < plan.budget_multiples.size(); ++b) {
          CellResult cell;
          cell.coords = {e, p, r, b};
          cell.env = plan.envs[e].name;
          cell.policy = plan.policies[p].name;
          cell.regime = plan.latency_regimes[r].name;
          cell.budget_multiple = plan.budget_multiples[b];
          cell.episodes.resize(plan.episodes_per_cell);
          for (std::size_t ep = 0; ep < plan.episodes_per_cell; ++ep) jobs.push_back({cells.size(), e, p, r, b, ep});
          cells.push_back(std::move(cell));
        }
      }
    }
  }

  const auto cell_dir = [&](const CellResult& c) {
    return *options.out_dir / "traces" / c.env / c.policy / c.regime / budget_label(c.budget_multiple);
  };
  if (options.out_dir) {
    for (const auto& c : cells) fs::create_directories(cell_dir(c));
  }

  TimerRegistry registry;
  std::atomic<std::size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr first_error;

  const auto worker = [&] {
    RealClock real;
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      const Job& job = jobs[i];
      CellResult& cell = cells[job.cell];
      try {
        const LoadedEnv& env = plan.envs[job.env];
        const std::uint64_t seed = episode_seed(plan.base_seed, job.env, job.policy, job.regime, job.budget, job.episode);

        SessionConfig config;
        config.env = env.instance_for(job.episode);
        config.budget = env.budget_for(job.episode, cell.budget_multiple);
        config.latency = plan.latency_regimes[job.regime].model;
        config.timer = TimerConfig{plan.alpha, plan.jitter, mix_seed(seed, 1)};
        config.reward_params = RewardParams{plan.r_f, plan.lambda, env.kind};
        config.max_steps = plan.max_steps;
        config.seed = mix_seed(seed, 0);
        config.query_latency = plan.query_latency;
        config.strict_format = plan.strict_format;
        config.metadata = {{"plan", plan.name},
                           {"cell",
                            {{"env", cell.env},
                             {"policy", cell.policy},
                             {"regime", cell.regime},
                             {"budget_multiple", cell.budget_multiple},
                             {"coords", cell.coords},
                             {"episode", job.episode}}}};

        const std::string file = episode_file(job.episode);
        SessionOptions session_options;
        session_options.session_id = cell.env + "/" + cell.policy + "/" + cell.regime + "/" +
                                     budget_label(cell.budget_multiple) + "/" + file;
        session_options.registry = &registry;
        session_options.clock = options.real_time ? &real : nullptr;

        auto policy = make_policy(plan.policies[job.policy].spec, mix_seed(seed, 2));
        const SessionResult result = run_session(*policy, config, session_options);
        cell.episodes[job.episode] = EpisodeRecord::from_result(job.episode, result);
        if (options.out_dir) detail::write_file((cell_dir(cell) / file).string(), serialize_trace(result.trace));
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) {
          first_error = std::make_exception_ptr(Error("cell " + cell.env + "/" + cell.policy + "/" + cell.regime + "/" +
                                                      budget_label(cell.budget_multiple) + " episode " +
                                                      std::to_string(job.episode) + ": " + e.what()));
        }
        next = jobs.size();
      }
    }
  };

  std::size_t threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, std::max<std::size_t>(jobs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  for (auto& c : cells) {
    c.aggregates = aggregate(c.episodes);
    if (options.out_dir) detail::write_file((cell_dir(c) / "cell.json").string(), cell_json(c).dump(2) + "\n");
  }
  return cells;
}

std::vector<CellResult> load_results(const fs::path& trace_root) {
  if (!fs::is_directory(trace_root)) throw IoError("no trace directory at '" + trace_root.string() + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(trace_root)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.rfind("episode-", 0) == 0 && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());

  std::map<std::array<std::size_t, 4>, CellResult> by_cell;
  for (const auto& file : files) {
    const auto events = parse_trace(detail::read_file(file.string()));
    if (events.empty() || events.front().kind != TraceEvent::Kind::session_start ||
        events.back().kind != TraceEvent::Kind::session_end) {
      throw ValidationError("trace '" + file.string() + "' is incomplete");
    }
    const std::string where = "trace '" + file.string() + "'";
    const auto meta = detail::require<nlohmann::json>(
        detail::require<nlohmann::json>(events.front().payload, "metadata", where), "cell", where);
    const auto coords = detail::require<std::array<std::size_t, 4>>(meta, "coords", where);
    CellResult& cell = by_cell[coords];
    cell.coords = coords;
    cell.env = detail::require<std::string>(meta, "env", where);
    cell.policy = detail::require<std::string>(meta, "policy", where);
    cell.regime = detail::require<std::string>(meta, "regime", where);
    cell.budget_multiple = detail::require<double>(meta, "budget_multiple", where);
    cell.episodes.push_back(
        EpisodeRecord::from_summary(detail::require<std::size_t>(meta, "episode", where), events.back().payload));
  }
  if (by_cell.empty()) throw ValidationError("no traces under '" + trace_root.string() + "'");

  std::vector<CellResult> out;
  for (auto& [_, cell] : by_cell) {
    std::sort(cell.episodes.begin(), cell.episodes.end(),
              [](const EpisodeRecord& a, const EpisodeRecord& b) { return a.episode < b.episode; });
    cell.aggregates = aggregate(cell.episodes);
    out.push_back(std::move(cell));
  }
  return out;
}

}  // namespace timely
