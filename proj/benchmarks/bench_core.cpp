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

#include <benchmark/benchmark.h>

#include "timely/envsim/game.hpp"
#include "timely/protocol/scripted.hpp"
#include "timely/protocol/wire.hpp"
#include "timely/reward/reward.hpp"
#include "timely/session/session.hpp"
#include "timely/timecore/ledger.hpp"

namespace {

using namespace timely;
using namespace timely::duration_literals;

void BM_LedgerAppend(benchmark::State& state) {
  for (auto _ : state) {
    TimeLedger ledger;
    for (int i = 0; i < state.range(0); ++i) ledger.append(1_s, 2_s);
    benchmark::DoNotOptimize(ledger.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LedgerAppend)->Arg(16)->Arg(256);

void BM_WeightedTotal(benchmark::State& state) {
  TimeLedger ledger;
  for (int i = 0; i < state.range(0); ++i) ledger.append(Duration::from_micros(1000 + i), Duration::from_micros(7 * i));
  for (auto _ : state) benchmark::DoNotOptimize(weighted_total(ledger));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WeightedTotal)->Arg(16)->Arg(256);

void BM_ComputeReward(benchmark::State& state) {
  const auto params = RewardParams::defaults_for(TaskKind::reasoning);
  std::int64_t t = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(compute_reward(Duration::from_micros(t), 0.5, 100_s, params));
    t = (t + 7919) % 100'000'000;
  }
}
BENCHMARK(BM_ComputeReward);

void BM_GameSession(benchmark::State& state) {
  auto spec = std::make_shared<const GameSpec>(
      load_game_spec_file(std::string(TIMELY_BENCH_FIXTURE_DIR) + "/games/mini-zork.json"));
  SessionConfig config;
  config.env = EnvironmentRef::of(spec);
  config.budget = BudgetSpec::step_based(1_s, 60);
  config.latency = LatencyModel::uniform(0_s, 2_s);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    SyntheticGamePolicy policy(1_s, 0.6, seed++);
    benchmark::DoNotOptimize(run_session(policy, config).turns);
  }
}
BENCHMARK(BM_GameSession);

void BM_WireRoundTrip(benchmark::State& state) {
  WireMessage msg;
  msg.kind = MessageKind::tool_response;
  msg.session_id = "conn-1";
  msg.seq = 12;
  msg.payload = {{"text", "You walk north. You have played for 4.60 seconds."}, {"tool_name", "step"}};
  for (auto _ : state) benchmark::DoNotOptimize(decode_message(encode_message(msg)));
}
BENCHMARK(BM_WireRoundTrip);

}  // namespace

BENCHMARK_MAIN();
