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

#include "timely/timerlink/timer.hpp"

#include <algorithm>
#include <cstdlib>

#include "json_util.hpp"

namespace timely {

JitterModel JitterModel::uniform(std::int64_t lo_us, std::int64_t hi_us) {
  if (lo_us > hi_us) throw InvalidArgument("jitter requires lo <= hi");
  return {Kind::uniform, lo_us, hi_us};
}

std::int64_t JitterModel::bound_us() const noexcept {
  if (kind == Kind::none) return 0;
  return std::max(std::llabs(lo_us), std::llabs(hi_us));
}

void TimerRegistry::register_session(const std::string& session_id, const TimerConfig& config,
                                     std::shared_ptr<const TimeLedger> ledger) {
  if (!(config.alpha > 0.0)) throw InvalidArgument("timer alpha must be positive");
  if (!ledger) throw InvalidArgument("timer registration requires a ledger");
  std::lock_guard lock(mu_);
  auto [it, inserted] = entries_.try_emplace(session_id, Entry{config, std::move(ledger), SeededRng(config.seed)});
  if (!inserted) throw AlreadyRegistered("session '" + session_id + "' is already registered");
}

TimerReading TimerRegistry::read(const std::string& session_id) {
  std::lock_guard lock(mu_);
  auto it = entries_.find(session_id);
  if (it == entries_.end()) throw NotRegistered("session '" + session_id + "' is not registered");
  Entry& entry = it->second;

  TimerReading reading{scaled_total(*entry.ledger, entry.config.alpha), 0};
  std::int64_t noise = 0;
  if (entry.config.jitter.kind == JitterModel::Kind::uniform) {
    noise = entry.rng.uniform_int(entry.config.jitter.lo_us, entry.config.jitter.hi_us);
  }
  reading.reported_us = std::max<std::int64_t>(0, reading.effective.micros() + noise);
  return reading;
}

void TimerRegistry::unregister(const std::string& session_id) {
  std::lock_guard lock(mu_);
  if (entries_.erase(session_id) == 0) throw NotRegistered("session '" + session_id + "' is not registered");
}

std::size_t TimerRegistry::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

bool TimerRegistry::contains(const std::string& session_id) const {
  std::lock_guard lock(mu_);
  return entries_.contains(session_id);
}

std::string duration_response_text(std::int64_t reported_us) {
  return format_seconds_2dp(reported_us) + " seconds.";
}

void to_json(nlohmann::json& j, const JitterModel& jitter) {
  if (jitter.kind == JitterModel::Kind::none) {
    j = {{"kind", "none"}};
  } else {
    j = {{"kind", "uniform"}, {"lo_us", jitter.lo_us}, {"hi_us", jitter.hi_us}};
  }
}

void from_json(const nlohmann::json& j, JitterModel& jitter) {
  const auto kind = detail::require<std::string>(j, "kind", "jitter");
  if (kind == "none") {
    jitter = JitterModel::none();
  } else if (kind == "uniform") {
    jitter = JitterModel::uniform(detail::require<std::int64_t>(j, "lo_us", "jitter"),
                                  detail::require<std::int64_t>(j, "hi_us", "jitter"));
  } else {
    throw ValidationError("jitter kind must be none or uniform, got '" + kind + "'");
  }
}

void to_json(nlohmann::json& j, const TimerConfig& config) {
  j = {{"alpha", config.alpha}, {"jitter", config.jitter}, {"seed", config.seed}};
}

void from_json(const nlohmann::json& j, TimerConfig& config) {
  config.alpha = detail::optional<double>(j, "alpha", 1.0, "timer");
  if (!(config.alpha > 0.0)) throw ValidationError("timer: alpha must be positive");
  config.jitter = j.contains("jitter") ? j.at("jitter").get<JitterModel>() : JitterModel::none();
  config.seed = detail::optional<std::uint64_t>(j, "seed", 0, "timer");
}

}  // namespace timely
