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

#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "timely/protocol/scripted.hpp"
#include "timely/session/tags.hpp"
#include "timely/timecore/errors.hpp"
#include "timely/timecore/rng.hpp"

namespace timely {
namespace {

using namespace duration_literals;
using timely::testing::game;
using timely::testing::math_task;
using timely::testing::ml_task;

PolicyOutput call(Duration gen, std::string name, nlohmann::json args = nlohmann::json::object()) {
  return PolicyOutput{gen, "", ToolCall{std::move(name), std::move(args)}};
}

PolicyOutput say(Duration gen, std::string body) { return PolicyOutput{gen, std::move(body), std::nullopt}; }

SessionConfig game_config(const std::string& name, Duration budget, LatencyModel latency = LatencyModel::none()) {
  SessionConfig c;
  c.env = EnvironmentRef::of(game(name));
  c.budget = BudgetSpec::step_based(budget, 1.0);
  c.latency = std::move(latency);
  c.reward_params = RewardParams::defaults_for(TaskKind::game);
  return c;
}

SessionConfig reasoning_config(std::size_t task, double factor) {
  SessionConfig c;
  c.env = EnvironmentRef::of(math_task(task));
  c.budget = BudgetSpec::per_case(c.env.reasoning->baseline_x, factor);
  return c;
}

// --- tags -----------------------------------------------------------------

TEST(Tags, Examples) {
  EXPECT_DOUBLE_EQ(*parse_tags("<conclusion>total duration: 1.36 seconds</conclusion>").conclusion_duration, 1.36);
  EXPECT_EQ(*parse_tags("<answer>\\boxed{5}</answer>").answer, "\\boxed{5}");
  const auto none = parse_tags("no tags here");
  EXPECT_FALSE(none.summary || none.answer || none.score || none.accuracy || none.conclusion_duration);
  EXPECT_FALSE(none.has_final_construct());
  EXPECT_DOUBLE_EQ(*parse_tags("<accuracy> 0.9394 </accuracy>").accuracy, 0.9394);
}

TEST(Tags, TolerantAndFirstOccurrence) {
  const auto bad = parse_tags("<conclusion>roughly a while</conclusion>");
  EXPECT_TRUE(bad.conclusion_present);
  EXPECT_FALSE(bad.conclusion_duration);
  EXPECT_EQ(*parse_tags("<score>10</score><score>20</score>").score, 10);
  EXPECT_FALSE(parse_tags("<answer>unterminated").answer);
  EXPECT_EQ(conclusion_tag(1.355), "<conclusion>total duration: 1.36 seconds</conclusion>");
}

// --- dispatch ---------------------------------------------------------------

TEST(Dispatch, GameQueryTexts) {
  Session s(game_config("mini-zork", 100_s));
  const auto max = s.dispatch_tool({"get_max_score", {}}, 1_s);
  EXPECT_NE(max.text.find("The max score is 350"), std::string::npos);
  EXPECT_NE(max.text.find("You have played for 1.50 seconds."), std::string::npos);
  EXPECT_EQ(max.tool_latency, Duration::from_micros(500'000));

  const auto step = s.dispatch_tool({"step", {{"action", "open mailbox"}}}, 1_s);
  EXPECT_NE(step.text.find("Opening the small mailbox reveals a leaflet"), std::string::npos);
  EXPECT_NE(step.text.find("You have played for 2.50 seconds."), std::string::npos);
  EXPECT_EQ(s.ledger().size(), 2u);
}

TEST(Dispatch, ReasoningDurationFormat) {
  Session s(reasoning_config(0, 1.0));
  const auto r = s.dispatch_tool({"get_duration", {}}, Duration::from_micros(40'000));
  EXPECT_EQ(r.text, "0.54 seconds.");
}

TEST(Dispatch, WrongFamilyAndBadArgsAreErrorsNotAborts) {
  Session s(game_config("mini-zork", 100_s));
  const auto wrong = s.dispatch_tool({"execute_code_and_get_duration", {{"code", "x"}}}, 1_s);
  EXPECT_TRUE(wrong.text.starts_with("Error:"));
  EXPECT_TRUE(wrong.tool_latency.is_zero());
  EXPECT_TRUE(s.dispatch_tool({"step", {{"verb", "north"}}}, 1_s).text.starts_with("Error:"));
  EXPECT_TRUE(s.dispatch_tool({"teleport", {}}, 1_s).text.starts_with("Error:"));
  EXPECT_EQ(s.ledger().size(), 3u);
  EXPECT_EQ(s.effective_time(), 3_s);
}

TEST(Dispatch, MlExecutionText) {
  SessionConfig c;
  c.env = EnvironmentRef::of(ml_task("leaf_classification"));
  c.budget = BudgetSpec::step_based(100_s, 1.0);
  Session s(c);
  const auto ok = s.dispatch_tool({"execute_code_and_get_duration", {{"code", "#approach: random_forest"}}}, 2_s);
  EXPECT_TRUE(ok.text.starts_with("Code execution succeeded. Stdout: "));
  EXPECT_NE(ok.text.find("Evaluation accuracy: 0.9394. You have spent 7.22 seconds."), std::string::npos);
  const auto bad = s.dispatch_tool({"execute_code_and_get_duration", {{"code", "print(1)"}}}, 0_s);
  EXPECT_TRUE(bad.text.starts_with("Code execution failed. Error: "));
  EXPECT_NEAR(s.finalize().components.accuracy, 0.4697, 1e-12);
}

TEST(Dispatch, PerActionLatency) {
  auto latency = LatencyModel::per_action({{"north", LatencyModel::fixed(7_s)}}, LatencyModel::fixed(1_s));
  Session s(game_config("mini-zork", 100_s, latency));
  EXPECT_EQ(s.dispatch_tool({"step", {{"action", "open mailbox"}}}, 0_s).tool_latency, 1_s);
  EXPECT_EQ(s.dispatch_tool({"step", {{"action", "North"}}}, 0_s).tool_latency, 7_s);
}

TEST(Schemas, PerFamily) {
  auto names = [](TaskKind k) {
    std::vector<std::string> out;
    for (const auto& s : tool_schemas(k)) out.push_back(s.name);
    return out;
  };
  EXPECT_EQ(names(TaskKind::reasoning), std::vector<std::string>{"get_duration"});
  EXPECT_EQ(names(TaskKind::game), (std::vector<std::string>{"step", "get_available_actions", "get_score",
                                                              "get_max_score", "end_game", "get_duration"}));
  EXPECT_EQ(names(TaskKind::ml), (std::vector<std::string>{"execute_code_and_get_duration", "get_duration"}));
}

// --- run_session --------------------------------------------------------------

TEST(Run, CorrectAnswerTwoTurnHandTrace) {
  // Turn 1 probes (2s gen + 0.5s), turn 2 answers (1.5s gen): t = 4s of an 8s budget.
  FixedScriptPolicy policy({call(2_s, "get_duration"), say(Duration::from_micros(1'500'000),
                                                             "<answer>\\boxed{5}</answer>")},
                           false);
  const auto r = run_session(policy, reasoning_config(0, 1.0));
  EXPECT_EQ(r.termination, Termination::final_answer);
  EXPECT_TRUE(r.on_time);
  EXPECT_EQ(r.effective_time, 4_s);
  EXPECT_EQ(r.turns, 2u);
  // Oracle: 0.1 + 0.5 + 0.4 * sin(pi/4), with t = T/2.
  EXPECT_NEAR(r.reward.total, 0.88284271247461900976, 1e-9);
  EXPECT_EQ(*r.correct, true);
}

TEST(Run, CorrectAnswerAtBoundaryIsFullReward) {
  FixedScriptPolicy policy({say(8_s, "<answer>\\boxed{5}</answer>")}, false);
  const auto r = run_session(policy, reasoning_config(0, 1.0));
  EXPECT_TRUE(r.on_time);
  EXPECT_NEAR(r.reward.total, 1.0, 1e-9);
}

TEST(Run, NeverAnsweringPolicyRunsOutOfBudget) {
  FixedScriptPolicy policy({say(1_s, "still thinking")}, true);
  const auto r = run_session(policy, reasoning_config(0, 0.25));
  EXPECT_EQ(r.termination, Termination::budget_exceeded);
  EXPECT_FALSE(r.on_time);
  EXPECT_EQ(r.reward.total, 0.0);
}

TEST(Run, PerfectGameOverBudgetScoresZero) {
  SyntheticGamePolicy policy(10_s, 1.0, 1);
  auto config = game_config("mini-detective", 100_s);
  config.budget = BudgetSpec::step_based(10_s, 3.0);
  const auto r = run_session(policy, config);
  EXPECT_EQ(r.termination, Termination::budget_exceeded);
  EXPECT_EQ(r.reward.total, 0.0);
  EXPECT_EQ(*r.score_in_budget, 30);
  EXPECT_EQ(*r.final_score, 40);
}

TEST(Run, PerfectGameOnTimeHasFullAccuracy) {
  SyntheticGamePolicy policy(0_s, 1.0, 1);
  const auto r = run_session(policy, game_config("mini-zork", 1000_s));
  EXPECT_EQ(r.termination, Termination::env_terminal);
  EXPECT_EQ(*r.final_score, 350);
  EXPECT_DOUBLE_EQ(r.reward.components.accuracy, 1.0);
}

TEST(Run, ToolCallWithAnswerIsPolicyError) {
  PolicyOutput both = call(1_s, "get_duration");
  both.body = "<answer>5</answer>";
  FixedScriptPolicy policy({both}, false);
  const auto r = run_session(policy, reasoning_config(0, 1.0));
  EXPECT_EQ(r.termination, Termination::policy_error);
  EXPECT_EQ(r.reward.total, 0.0);
  EXPECT_TRUE(r.ledger.empty());
  EXPECT_FALSE(r.error.empty());
}

TEST(Run, ThrowingPolicyIsPolicyError) {
  FixedScriptPolicy policy({}, false);
  const auto r = run_session(policy, reasoning_config(0, 1.0));
  EXPECT_EQ(r.termination, Termination::policy_error);
  EXPECT_EQ(r.reward.total, 0.0);
}

TEST(Run, StepCap) {
  FixedScriptPolicy policy({call(0_s, "step", {{"action", "xyzzy"}})}, true);
  auto config = game_config("mini-zork", 100_s);
  config.max_steps = 5;
  const auto r = run_session(policy, config);
  EXPECT_EQ(r.termination, Termination::step_cap);
  EXPECT_EQ(r.turns, 5u);
}

TEST(Run, StrictFormatWithholdsFormatTerm) {
  auto config = reasoning_config(0, 1.0);
  config.strict_format = true;
  FixedScriptPolicy bare({say(8_s, "<answer>5</answer>")}, false);
  const auto r1 = run_session(bare, config);
  EXPECT_FALSE(r1.format_ok);
  EXPECT_NEAR(r1.reward.total, 0.9, 1e-9);
  FixedScriptPolicy tagged({say(8_s, "<conclusion>total duration: 8 seconds</conclusion><answer>5</answer>")}, false);
  EXPECT_NEAR(run_session(tagged, config).reward.total, 1.0, 1e-9);
}

TEST(Run, SlowPolicyTurnCount) {
  // gen 8s under zero latency and a 60s budget: at most floor(60/8) turns finish in budget.
  SyntheticGamePolicy policy(8_s, 0.5, 4);
  const auto r = run_session(policy, game_config("mini-detective", 60_s));
  EXPECT_LE(r.env_calls_in_budget, 7u);
}

TEST(Run, RoundsLaw) {
  for (std::int64_t L : {2, 10, 50}) {
    for (std::int64_t B : {60, 500, 1000}) {
      FixedScriptPolicy policy({call(0_s, "step", {{"action", "xyzzy"}})}, true);
      auto config = game_config("mini-zork", Duration::from_seconds(B), LatencyModel::fixed(Duration::from_seconds(L)));
      config.max_steps = 10'000;
      const auto r = run_session(policy, config);
      EXPECT_EQ(r.termination, Termination::budget_exceeded);
      EXPECT_EQ(static_cast<std::int64_t>(r.env_calls_in_budget), B / L) << "L=" << L << " B=" << B;
      EXPECT_EQ(static_cast<std::int64_t>(r.env_calls_in_budget),
                predicted_rounds(Duration::from_seconds(B), Duration::from_seconds(L)));
    }
  }
}

// Random episode over any family, driven by a seeded script.
struct RandomEpisode {
  SessionConfig config;
  std::unique_ptr<Policy> policy;
};

RandomEpisode random_episode(SeededRng& rng) {
  RandomEpisode ep;
  const auto family = rng.uniform_int(0, 2);
  const auto gen = [&] { return Duration::from_micros(rng.uniform_int(0, 3'000'000)); };
  std::vector<PolicyOutput> script;
  const auto n = rng.uniform_int(1, 12);
  if (family == 0) {
    ep.config = reasoning_config(static_cast<std::size_t>(rng.uniform_int(0, 19)), 0.25 + rng.uniform01());
    for (std::int64_t i = 0; i + 1 < n; ++i) {
      script.push_back(rng.bernoulli(0.5) ? call(gen(), "get_duration") : say(gen(), "hmm"));
    }
    script.push_back(say(gen(), "<answer>\\boxed{" + ep.config.env.reasoning->ground_truth + "}</answer>"));
  } else if (family == 1) {
    static const char* names[] = {"mini-zork", "mini-detective", "mini-advent", "mini-enchanter"};
    ep.config = game_config(names[rng.uniform_int(0, 3)], Duration::from_micros(rng.uniform_int(1'000'000, 30'000'000)),
                            LatencyModel::uniform(0_s, 5_s));
    ep.policy = std::make_unique<SyntheticGamePolicy>(gen(), rng.uniform01(), rng.next_u64());
  } else {
    static const char* names[] = {"leaf_classification", "spaceship_titanic", "random_acts_of_pizza",
                                  "detecting_insults"};
    ep.config.env = EnvironmentRef::of(ml_task(names[rng.uniform_int(0, 3)]));
    ep.config.reward_params = RewardParams::defaults_for(TaskKind::ml);
    ep.config.budget = BudgetSpec::step_based(Duration::from_micros(rng.uniform_int(1'000'000, 40'000'000)), 1.0);
    ep.config.latency = LatencyModel::uniform(0_s, 2_s);
    for (std::int64_t i = 0; i + 1 < n; ++i) {
      const auto& approaches = ep.config.env.ml->approaches;
      const auto& key = approaches[rng.uniform_int(0, static_cast<std::int64_t>(approaches.size()) - 1)].first;
      script.push_back(call(gen(), "execute_code_and_get_duration", {{"code", "#approach: " + key}}));
    }
    script.push_back(say(gen(), "<accuracy>0.5</accuracy>"));
  }
  ep.config.timer.alpha = std::vector<double>{0.5, 1.0, 2.0, 4.0}[rng.uniform_int(0, 3)];
  ep.config.seed = rng.next_u64();
  if (!ep.policy) ep.policy = std::make_unique<FixedScriptPolicy>(std::move(script), false);
  return ep;
}

TEST(RunProperty, BudgetSoundnessConservationAndReplay) {
  SeededRng rng(2024);
  int over = 0, on_time = 0;
  for (int i = 0; i < 1000; ++i) {
    auto ep = random_episode(rng);
    const auto r = run_session(*ep.policy, ep.config);
    ASSERT_EQ(r.effective_time, scaled_total(r.ledger, ep.config.timer.alpha));
    ASSERT_EQ(replay_effective_time(r.trace, ep.config.timer.alpha), r.effective_time);
    ASSERT_EQ(r.on_time, r.effective_time <= r.t_max);
    ASSERT_EQ(r.termination == Termination::budget_exceeded, r.effective_time > r.t_max) << i;
    if (r.on_time) {
      ++on_time;
    } else {
      ++over;
      ASSERT_EQ(r.reward.total, 0.0);
      const auto& last = r.ledger.steps().back();
      const Duration last_step = scale(last.t_gen, ep.config.timer.alpha) + last.t_tool;
      ASSERT_LE(r.effective_time - r.t_max, last_step);
    }
    Duration prev;
    for (const auto& e : r.trace) {
      ASSERT_GE(e.cumulative_effective_time, prev);
      prev = e.cumulative_effective_time;
    }
  }
  EXPECT_GT(over, 50);
  EXPECT_GT(on_time, 50);
}

TEST(RunProperty, IdenticalInputsGiveByteIdenticalTraces) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    std::string first;
    for (int run = 0; run < 2; ++run) {
      SeededRng rng(seed);
      auto ep = random_episode(rng);
      const auto text = serialize_trace(run_session(*ep.policy, ep.config).trace);
      if (run == 0) {
        first = text;
      } else {
        EXPECT_EQ(text, first);
      }
    }
  }
}

TEST(Trace, StructureAndRoundTrip) {
  BudgetAwarePolicy policy(1_s, 0.2);
  const auto r = run_session(policy, game_config("mini-zork", 10_s));
  ASSERT_GE(r.trace.size(), 3u);
  EXPECT_EQ(r.trace.front().kind, TraceEvent::Kind::session_start);
  EXPECT_TRUE(r.trace.front().payload.contains("config"));
  EXPECT_EQ(r.trace.back().kind, TraceEvent::Kind::session_end);
  EXPECT_EQ(r.trace.back().payload, r.summary());
  const auto text = serialize_trace(r.trace);
  EXPECT_EQ(serialize_trace(parse_trace(text)), text);
}

TEST(Config, ValidationErrors) {
  auto config = reasoning_config(0, 1.0);
  config.max_steps = 0;
  EXPECT_THROW(config.validate(), ValidationError);
  SessionConfig missing;
  missing.env.kind = TaskKind::game;
  EXPECT_THROW(missing.validate(), ValidationError);
}

}  // namespace
}  // namespace timely
