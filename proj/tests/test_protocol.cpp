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

#include <sys/socket.h>

#include <thread>

#include "test_support.hpp"
#include "timely/protocol/scripted.hpp"
#include "timely/protocol/server.hpp"
#include "timely/protocol/transport.hpp"
#include "timely/protocol/wire.hpp"
#include "timely/timecore/errors.hpp"
#include "timely/timecore/rng.hpp"

namespace timely {
namespace {

using namespace duration_literals;
using timely::testing::game;
using timely::testing::math_task;
using timely::testing::ml_task;

WireMessage sample(MessageKind kind, std::uint64_t seq) {
  WireMessage m;
  m.kind = kind;
  m.session_id = "s-1";
  m.seq = seq;
  m.payload = {{"text", "line one\nline \"two\""}, {"n", static_cast<std::int64_t>(seq)}};
  return m;
}

// --- wire ---------------------------------------------------------------------

TEST(Wire, RoundTripEveryKind) {
  for (auto kind : {MessageKind::hello, MessageKind::observation, MessageKind::policy_output,
                    MessageKind::tool_response, MessageKind::session_end, MessageKind::error}) {
    const auto m = sample(kind, 7);
    const auto line = encode_message(m);
    ASSERT_EQ(line.back(), '\n');
    ASSERT_EQ(line.find('\n'), line.size() - 1);
    EXPECT_EQ(decode_message(line), m);
  }
}

TEST(Wire, UnknownFieldSurvivesRoundTrip) {
  const std::string golden =
      R"({"kind":"observation","session_id":"s","seq":3,"payload":{},"x_trace":{"span":"ab12"}})";
  const auto m = decode_message(golden);
  EXPECT_EQ(m.extra.at("x_trace").at("span"), "ab12");
  EXPECT_EQ(nlohmann::json::parse(encode_message(m)), nlohmann::json::parse(golden));
}

TEST(Wire, TruncatedLineNamesOffset) {
  const auto full = encode_message(sample(MessageKind::observation, 1));
  const auto cut = full.substr(0, 30);
  try {
    decode_message(cut);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_LE(e.byte_offset(), cut.size());
    EXPECT_GT(e.byte_offset(), 0u);
  }
  EXPECT_THROW(decode_message(R"({"kind":"gossip","session_id":"s","seq":0,"payload":{}})"), ProtocolError);
  EXPECT_THROW(decode_message(R"({"session_id":"s","seq":0,"payload":{}})"), ProtocolError);
  EXPECT_THROW(decode_message("[1,2]"), ProtocolError);
}

TEST(WireProperty, FramingIgnoresChunkBoundaries) {
  std::vector<WireMessage> messages;
  std::string stream;
  for (std::uint64_t i = 0; i < 40; ++i) {
    messages.push_back(sample(i % 2 ? MessageKind::observation : MessageKind::policy_output, i));
    stream += encode_message(messages.back());
  }
  SeededRng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    LineFramer framer;
    std::vector<WireMessage> decoded;
    std::size_t pos = 0;
    while (pos < stream.size()) {
      const auto n = static_cast<std::size_t>(rng.uniform_int(1, 97));
      framer.feed(std::string_view(stream).substr(pos, n));
      pos += n;
      while (auto line = framer.next_line()) decoded.push_back(decode_message(*line));
    }
    ASSERT_EQ(decoded, messages);
    ASSERT_EQ(framer.buffered_bytes(), 0u);
  }
}

TEST(Wire, ObservationCarriesNoOracle) {
  Observation obs;
  obs.session_id = "s";
  obs.seq = 4;
  obs.kind = Observation::Kind::tool_response;
  obs.task = TaskKind::game;
  obs.text = "hello";
  obs.tool_name = "step";
  obs.time_limit_seconds = 60;
  obs.reported_elapsed = 4.6;
  obs.oracle = OracleHints{};
  obs.oracle->best_action = "north";
  const auto msg = observation_message(obs);
  EXPECT_EQ(msg.kind, MessageKind::tool_response);
  EXPECT_EQ(msg.payload.dump().find("north"), std::string::npos);
  const auto back = observation_from_message(decode_message(encode_message(msg)));
  EXPECT_EQ(back.text, "hello");
  EXPECT_EQ(back.seq, 4u);
  EXPECT_EQ(back.tool_name, "step");
  EXPECT_EQ(back.reported_elapsed, 4.6);
  EXPECT_FALSE(back.oracle);
}

TEST(Wire, PolicyOutputPayloadRoundTrip) {
  const PolicyOutput out{Duration::from_micros(1234), "body", ToolCall{"step", {{"action", "north"}}}};
  const auto j = policy_output_payload(out);
  EXPECT_EQ(j.at("tool_call").at("name"), "step");
  EXPECT_EQ(policy_output_from_payload(j), out);
  const PolicyOutput bare{Duration::from_micros(5), "<answer>1</answer>", std::nullopt};
  EXPECT_TRUE(policy_output_payload(bare).at("tool_call").is_null());
  EXPECT_EQ(policy_output_from_payload(policy_output_payload(bare)), bare);
}

// --- scripted policies --------------------------------------------------------

SessionConfig game_config(const std::string& name, Duration budget) {
  SessionConfig c;
  c.env = EnvironmentRef::of(game(name));
  c.budget = BudgetSpec::step_based(budget, 1.0);
  c.reward_params = RewardParams::defaults_for(TaskKind::game);
  return c;
}

TEST(SyntheticGame, PerfectQualityFollowsScorePath) {
  std::vector<std::int64_t> trajectory;
  SyntheticGamePolicy policy(1_s, 1.0, 99);
  auto config = game_config("mini-detective", 1000_s);
  const auto r = run_session(policy, config);
  for (const auto& e : r.trace) {
    if (e.kind == TraceEvent::Kind::tool_response) trajectory.push_back(e.payload.at("score_delta"));
  }
  // Hand trace: every step takes the +10 annotated action until the finale.
  ASSERT_EQ(trajectory.size(), 36u);
  for (auto d : trajectory) EXPECT_EQ(d, 10);
  EXPECT_EQ(*r.final_score, 360);
}

TEST(SyntheticGame, ZeroQualityWalkReplays) {
  const auto run = [](std::uint64_t seed) {
    SyntheticGamePolicy policy(1_s, 0.0, seed);
    auto config = game_config("mini-zork", 30_s);
    return serialize_trace(run_session(policy, config).trace);
  };
  EXPECT_EQ(run(17), run(17));
  EXPECT_NE(run(17), run(18));
}

TEST(SyntheticGameProperty, ScoreNondecreasingInQuality) {
  for (const char* name : {"mini-zork", "mini-detective", "mini-advent", "mini-enchanter"}) {
    auto config = game_config(name, 10'000_s);
    config.max_steps = 30;
    double prev = -1.0;
    for (double q : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      double total = 0.0;
      for (std::uint64_t e = 0; e < 256; ++e) {
        SyntheticGamePolicy policy(1_s, q, mix_seed(7, e));
        total += static_cast<double>(*run_session(policy, config).final_score);
      }
      const double mean = total / 256.0;
      EXPECT_GE(mean, prev) << name << " q=" << q;
      prev = mean;
    }
  }
}

TEST(BudgetAware, ConcludesInTimeWithConclusionTag) {
  BudgetAwarePolicy policy(1_s, 0.2);
  auto config = game_config("mini-zork", 10_s);
  const auto r = run_session(policy, config);
  EXPECT_EQ(r.termination, Termination::final_answer);
  EXPECT_TRUE(r.on_time);
  std::optional<std::int64_t> last_probe;
  std::string final_body;
  for (const auto& e : r.trace) {
    if (e.kind == TraceEvent::Kind::tool_response && e.payload.at("name") == "get_duration") {
      last_probe = e.payload.at("reported_elapsed_us").get<std::int64_t>();
    }
    if (e.kind == TraceEvent::Kind::policy_turn) final_body = e.payload.at("body");
  }
  ASSERT_TRUE(last_probe);
  EXPECT_LE(*last_probe, 8'000'000);
  const auto tags = parse_tags(final_body);
  ASSERT_TRUE(tags.conclusion_duration);
  EXPECT_NEAR(*tags.conclusion_duration, *last_probe / 1e6, 0.005);
}

TEST(BudgetAware, BudgetBelowOneTurnIsLate) {
  BudgetAwarePolicy policy(1_s, 0.2);
  auto config = game_config("mini-zork", Duration::from_micros(500'000));
  const auto r = run_session(policy, config);
  EXPECT_FALSE(r.on_time);
  EXPECT_EQ(r.termination, Termination::budget_exceeded);
}

TEST(BudgetAware, MoreBudgetMoreTurns) {
  std::size_t prev = 0;
  for (int k = 1; k <= 5; ++k) {
    BudgetAwarePolicy policy(1_s, 0.2);
    auto config = game_config("mini-advent", 10_s);
    config.budget = BudgetSpec::step_based(10_s, k);
    const auto r = run_session(policy, config);
    EXPECT_TRUE(r.on_time);
    EXPECT_GE(r.turns, prev) << k;
    prev = r.turns;
  }
}

TEST(BudgetAware, ReasoningAnswerIsCorrect) {
  BudgetAwarePolicy policy(1_s, 0.2);
  SessionConfig config;
  config.env = EnvironmentRef::of(math_task(0));
  config.budget = BudgetSpec::per_case(config.env.reasoning->baseline_x, 1.0);
  const auto r = run_session(policy, config);
  EXPECT_TRUE(r.on_time);
  EXPECT_EQ(r.correct, true);
}

SessionConfig leaf_config(Duration budget) {
  SessionConfig c;
  c.env = EnvironmentRef::of(ml_task("leaf_classification"));
  c.budget = BudgetSpec::step_based(budget, 1.0);
  c.reward_params = RewardParams::defaults_for(TaskKind::ml);
  return c;
}

TEST(MlLadder, OnlyFirstApproachFits) {
  // 2s gen + 2.1s run, then gradient boosting would need 2 + 18.4 + 2 more: only the first fits in 10s.
  MLLadderPolicy policy(2_s, std::vector<std::string>{"logistic_regression", "gradient_boosting"});
  const auto r = run_session(policy, leaf_config(10_s));
  EXPECT_TRUE(r.on_time);
  EXPECT_EQ(r.env_calls_in_budget, 1u);
  EXPECT_DOUBLE_EQ(*r.best_accuracy, 0.88);
}

TEST(MlLadder, BothApproachesFit) {
  MLLadderPolicy policy(2_s, std::vector<std::string>{"logistic_regression", "gradient_boosting"});
  const auto r = run_session(policy, leaf_config(40_s));
  EXPECT_TRUE(r.on_time);
  EXPECT_EQ(r.env_calls_in_budget, 2u);
  EXPECT_DOUBLE_EQ(*r.best_accuracy, 0.9512);
}

TEST(MlLadder, EmptyLadderConcludesAtOnce) {
  MLLadderPolicy policy(2_s, std::vector<std::string>{});
  const auto r = run_session(policy, leaf_config(40_s));
  EXPECT_EQ(r.termination, Termination::final_answer);
  EXPECT_EQ(r.turns, 1u);
  EXPECT_TRUE(r.on_time);
  EXPECT_NEAR(r.reward.total, 0.1, 1e-12);
}

TEST(MakePolicy, SpecsAndErrors) {
  EXPECT_NO_THROW(validate_policy_spec({{"kind", "synthetic_game"}, {"gen_time_us", 1000000}, {"quality_q", 0.6}}));
  EXPECT_THROW(validate_policy_spec({{"kind", "synthetic_game"}, {"gen_time_us", 1}, {"quality_q", 1.5}}),
               ValidationError);
  EXPECT_THROW(validate_policy_spec({{"kind", "budget_aware"}, {"gen_time_us", 1}, {"safety_margin", 1.0}}),
               ValidationError);
  EXPECT_THROW(validate_policy_spec({{"kind", "oracle_of_delphi"}}), ValidationError);
  EXPECT_EQ(parse_reported_accuracy("...\nEvaluation accuracy: 0.9394. You have spent 7.32 seconds."), 0.9394);
  EXPECT_EQ(parse_reported_accuracy("Code execution failed."), std::nullopt);
}

// --- transports -----------------------------------------------------------------

SessionConfig reasoning_config() {
  SessionConfig c;
  c.env = EnvironmentRef::of(math_task(0));
  c.budget = BudgetSpec::per_case(c.env.reasoning->baseline_x, 1.0);
  return c;
}

std::vector<PolicyOutput> answer_script() {
  return {PolicyOutput{Duration::from_micros(300'000), "", ToolCall{"get_duration", {}}},
          PolicyOutput{Duration::from_micros(200'000), "<answer>\\boxed{5}</answer>", std::nullopt}};
}

TEST(Transport, InProcessSocketPairSession) {
  int fds[2];
  ASSERT_EQ(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds), 0);
  nlohmann::json client_summary;
  std::thread client([&] {
    FdChannel channel(fds[1]);
    FixedScriptPolicy policy(answer_script(), false);
    client_summary = run_policy_client(policy, channel);
  });
  FdChannel server(fds[0]);
  accept_handshake(server, "pair-1", {{"task", "reasoning"}});
  RemotePolicy remote(server);
  const auto r = run_session(remote, reasoning_config(), SessionOptions{"pair-1"});
  client.join();
  EXPECT_EQ(r.termination, Termination::final_answer);
  EXPECT_EQ(r.effective_time, Duration::from_micros(1'000'000));
  EXPECT_EQ(client_summary, r.summary());
}

TEST(Transport, SeqMismatchIsPolicyError) {
  int fds[2];
  ASSERT_EQ(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds), 0);
  std::thread peer([&] {
    FdChannel channel(fds[1]);
    const auto obs = decode_message(channel.receive_line());
    WireMessage reply;
    reply.kind = MessageKind::policy_output;
    reply.session_id = obs.session_id;
    reply.seq = obs.seq + 5;
    reply.payload = policy_output_payload(answer_script().back());
    channel.send_line(encode_message(reply));
  });
  FdChannel server(fds[0]);
  RemotePolicy remote(server);
  const auto r = run_session(remote, reasoning_config());
  peer.join();
  EXPECT_EQ(r.termination, Termination::policy_error);
  EXPECT_NE(r.error.find("seq"), std::string::npos);
  EXPECT_EQ(r.reward.total, 0.0);
}

TEST(Transport, ServerHandshakeMismatchThenSession) {
  std::vector<SessionResult> results;
  PolicyServer server([](std::uint64_t) { return reasoning_config(); }, ServerOptions{"127.0.0.1", 0, 2, false},
                      [&](const SessionResult& r) { results.push_back(r); });
  std::thread serving([&] { server.serve(); });
  {
    FdChannel bad(connect_tcp("127.0.0.1", server.port()));
    WireMessage hello;
    hello.kind = MessageKind::hello;
    hello.payload = {{"protocol", "timely/0"}};
    bad.send_line(encode_message(hello));
    const auto reply = decode_message(bad.receive_line());
    EXPECT_EQ(reply.kind, MessageKind::error);
    EXPECT_NE(reply.payload.at("message").get<std::string>().find("timely/1"), std::string::npos);
    EXPECT_THROW(bad.receive_line(), IoError);
  }
  nlohmann::json summary;
  {
    FdChannel good(connect_tcp("127.0.0.1", server.port()));
    FixedScriptPolicy policy(answer_script(), false);
    summary = run_policy_client(policy, good);
  }
  serving.join();
  ASSERT_EQ(results.size(), 1u);
  EXPECT_EQ(summary.at("termination"), "final_answer");
  EXPECT_EQ(results[0].summary(), summary);
  EXPECT_EQ(server.sessions_started(), 2u);
}

#ifdef TIMELY_CLI_PATH
TEST(Transport, SubprocessPolicyOverStdio) {
  const nlohmann::json spec = {
      {"kind", "fixed_script"},
      {"loop", false},
      {"script",
       {{{"declared_gen_time_us", 300000}, {"body", ""}, {"tool_call", {{"name", "get_duration"}, {"arguments", nlohmann::json::object()}}}},
        {{"declared_gen_time_us", 200000}, {"body", "<answer>\\boxed{5}</answer>"}, {"tool_call", nullptr}}}}};
  SubprocessPolicy policy({TIMELY_CLI_PATH, "play", spec.dump()}, "sub-1", {{"task", "reasoning"}});
  const auto r = run_session(policy, reasoning_config(), SessionOptions{"sub-1"});
  EXPECT_EQ(policy.wait(), 0);
  EXPECT_EQ(r.termination, Termination::final_answer);
  EXPECT_EQ(r.correct, true);
  EXPECT_EQ(r.effective_time, Duration::from_micros(1'000'000));
}
#endif

}  // namespace
}  // namespace timely
