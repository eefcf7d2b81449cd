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
#include <memory>
#include <thread>
#include <vector>

#include "timely/timecore/errors.hpp"
#include "timely/timecore/rng.hpp"
#include "timely/timerlink/timer.hpp"

namespace timely {
namespace {

using namespace duration_literals;

std::shared_ptr<TimeLedger> ledger_with(Duration gen, Duration tool) {
  auto l = std::make_shared<TimeLedger>();
  l->append(gen, tool);
  return l;
}

TEST(Timer, IdentityCoefficient) {
  TimerRegistry reg;
  reg.register_session("s1", TimerConfig{1.0, JitterModel::none(), 0}, ledger_with(5_s, Duration::zero()));
  EXPECT_DOUBLE_EQ(reg.get_duration("s1"), 5.0);
}

TEST(Timer, AlphaScalesGenerationOnly) {
  TimerRegistry reg;
  reg.register_session("s1", TimerConfig{2.0, JitterModel::none(), 0}, ledger_with(3_s, 10_s));
  EXPECT_DOUBLE_EQ(reg.get_duration("s1"), 16.0);
}

TEST(Timer, JitterStaysInBoundAndReplays) {
  const TimerConfig config{1.0, JitterModel::uniform(-500'000, 500'000), 77};
  std::vector<std::int64_t> first;
  for (int run = 0; run < 2; ++run) {
    TimerRegistry reg;
    reg.register_session("s", config, ledger_with(6_s, 10_s));
    for (int i = 0; i < 200; ++i) {
      const auto r = reg.read("s");
      EXPECT_EQ(r.effective, 16_s);
      EXPECT_LE(std::llabs(r.reported_us - r.effective.micros()), 500'000);
      if (run == 0) {
        first.push_back(r.reported_us);
      } else {
        EXPECT_EQ(r.reported_us, first[i]);
      }
    }
  }
}

TEST(Timer, ReportsClampAtZero) {
  TimerRegistry reg;
  reg.register_session("s", TimerConfig{1.0, JitterModel::uniform(-5'000'000, -4'000'000), 1},
                       ledger_with(1_s, Duration::zero()));
  for (int i = 0; i < 20; ++i) EXPECT_EQ(reg.read("s").reported_us, 0);
}

TEST(Timer, RegistrationErrors) {
  TimerRegistry reg;
  reg.register_session("s1", TimerConfig{}, std::make_shared<TimeLedger>());
  EXPECT_THROW(reg.register_session("s1", TimerConfig{}, std::make_shared<TimeLedger>()), AlreadyRegistered);
  EXPECT_THROW(reg.register_session("s2", TimerConfig{0.0, {}, 0}, std::make_shared<TimeLedger>()), InvalidArgument);
  EXPECT_THROW(reg.read("nope"), NotRegistered);
  reg.unregister("s1");
  EXPECT_THROW(reg.get_duration("s1"), NotRegistered);
  EXPECT_THROW(reg.unregister("s1"), NotRegistered);
}

TEST(Timer, HundredIndependentEntries) {
  TimerRegistry reg;
  for (int i = 0; i < 100; ++i) {
    reg.register_session("s" + std::to_string(i), TimerConfig{}, ledger_with(Duration::from_seconds(i), 0_s));
  }
  EXPECT_EQ(reg.size(), 100u);
  for (int i = 0; i < 100; ++i) EXPECT_DOUBLE_EQ(reg.get_duration("s" + std::to_string(i)), i);
}

TEST(Timer, RegisterUnregisterCyclesLeaveRegistryEmpty) {
  TimerRegistry reg;
  for (int i = 0; i < 1000; ++i) {
    reg.register_session("cycle", TimerConfig{}, std::make_shared<TimeLedger>());
    reg.unregister("cycle");
  }
  EXPECT_EQ(reg.size(), 0u);
}

TEST(TimerProperty, EffectiveTimeRuleOverAlphaGrid) {
  SeededRng rng(11);
  for (double alpha : {0.5, 1.0, 2.0, 4.0}) {
    for (int trial = 0; trial < 100; ++trial) {
      auto ledger = std::make_shared<TimeLedger>();
      TimerRegistry reg;
      reg.register_session("s", TimerConfig{alpha, JitterModel::none(), 0}, ledger);
      std::int64_t previous = 0;
      std::int64_t gen = 0, tool = 0;
      const auto steps = rng.uniform_int(1, 20);
      for (std::int64_t i = 0; i < steps; ++i) {
        const auto g = rng.uniform_int(0, 30'000'000);
        const auto t = rng.uniform_int(0, 60'000'000);
        ledger->append(Duration::from_micros(g), Duration::from_micros(t));
        gen += g;
        tool += t;
        const auto reading = reg.read("s");
        // Oracle: scale in long double and round half away from zero.
        const auto expected = static_cast<std::int64_t>(std::llroundl(static_cast<long double>(alpha) * gen)) + tool;
        ASSERT_EQ(reading.reported_us, expected);
        ASSERT_GE(reading.reported_us, previous);
        previous = reading.reported_us;
      }
    }
  }
}

TEST(TimerProperty, ConcurrentSessionsAreIsolated) {
  TimerRegistry reg;
  constexpr int kSessions = 50;
  std::vector<std::shared_ptr<TimeLedger>> ledgers;
  for (int i = 0; i < kSessions; ++i) {
    ledgers.push_back(std::make_shared<TimeLedger>());
    reg.register_session("s" + std::to_string(i), TimerConfig{}, ledgers.back());
  }
  std::vector<std::thread> threads;
  std::atomic<int> violations{0};
  for (int i = 0; i < kSessions; ++i) {
    threads.emplace_back([&, i] {
      // Each session's ledger grows by a signature amount: i+1 microseconds per step.
      for (int step = 1; step <= 200; ++step) {
        ledgers[i]->append(Duration::zero(), Duration::from_micros(i + 1));
        if (reg.read("s" + std::to_string(i)).reported_us != static_cast<std::int64_t>(step) * (i + 1)) ++violations;
      }
    });
  }
  for (auto& t : threads) t.join();
  EXPECT_EQ(violations.load(), 0);
}

TEST(Timer, DurationResponseText) {
  EXPECT_EQ(duration_response_text(540'000), "0.54 seconds.");
  EXPECT_EQ(duration_response_text(16'000'000), "16.00 seconds.");
}

TEST(Timer, ConfigJson) {
  const auto j = nlohmann::json::parse(
      R"({"alpha":2.0,"jitter":{"kind":"uniform","lo_us":-500000,"hi_us":500000},"seed":9})");
  const auto c = j.get<TimerConfig>();
  EXPECT_EQ(c.alpha, 2.0);
  EXPECT_EQ(c.jitter.bound_us(), 500'000);
  EXPECT_EQ(nlohmann::json(c), j);
}

}  // namespace
}  // namespace timely
