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

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "timely/timecore/duration.hpp"
#include "timely/timecore/ledger.hpp"
#include "timely/timecore/rng.hpp"

namespace timely {

// Additive noise on reported elapsed time, in signed microseconds.
struct JitterModel {
  enum class Kind { none, uniform };

  Kind kind = Kind::none;
  std::int64_t lo_us = 0;
  std::int64_t hi_us = 0;

  static JitterModel none() { return {}; }
  static JitterModel uniform(std::int64_t lo_us, std::int64_t hi_us);

  // max(|lo|, |hi|); zero for none.
  std::int64_t bound_us() const noexcept;
};

struct TimerConfig {
  double alpha = 1.0;  // scales generation time only
  JitterModel jitter;
  std::uint64_t seed = 0;
};

// One read of a session timer.
struct TimerReading {
  Duration effective;         // alpha * sum(t_gen) + sum(t_tool)
  std::int64_t reported_us;   // effective + jitter, clamped at 0

  double reported_seconds() const noexcept { return static_cast<double>(reported_us) / 1e6; }
};

/// Per-session timers behind the `get_duration` tool.
///
/// Each entry watches the ledger of its own session and owns a jitter rng
/// seeded from its config, so sessions never observe each other. The map
/// is guarded by a mutex; a given entry is only read by the orchestrator of
/// its session.
class TimerRegistry {
 public:
  TimerRegistry() = default;
  TimerRegistry(const TimerRegistry&) = delete;
  TimerRegistry& operator=(const TimerRegistry&) = delete;

  // Throws AlreadyRegistered for a duplicate id and InvalidArgument for a
  // non-positive alpha.
  void register_session(const std::string& session_id, const TimerConfig& config,
                        std::shared_ptr<const TimeLedger> ledger);

  // Consumes one jitter draw when jitter is enabled. Throws NotRegistered.
  TimerReading read(const std::string& session_id);
  double get_duration(const std::string& session_id) { return read(session_id).reported_seconds(); }

  // Throws NotRegistered.
  void unregister(const std::string& session_id);

  std::size_t size() const;
  bool contains(const std::string& session_id) const;

 private:
  struct Entry {
    TimerConfig config;
    std::shared_ptr<const TimeLedger> ledger;
    SeededRng rng;
  };

  mutable std::mutex mu_;
  std::unordered_map<std::string, Entry> entries_;
};

// "{t} seconds." with t rendered to two decimals.
std::string duration_response_text(std::int64_t reported_us);

void to_json(nlohmann::json& j, const JitterModel& jitter);
void from_json(const nlohmann::json& j, JitterModel& jitter);
void to_json(nlohmann::json& j, const TimerConfig& config);
void from_json(const nlohmann::json& j, TimerConfig& config);

}  // namespace timely
