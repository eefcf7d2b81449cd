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

#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "timely/session/session.hpp"
#include "timely/timerlink/timer.hpp"

namespace timely {

struct ServerOptions {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;       // 0 picks a free port
  std::size_t max_sessions = 0;  // stop accepting after this many; 0 = unbounded
  bool real_time = false;
};

/// TCP policy server. Every accepted connection is an external policy;
/// it handshakes "timely/1" and then plays one session, in its own thread,
/// against a config produced by the factory.
class PolicyServer {
 public:
  using ConfigFactory = std::function<SessionConfig(std::uint64_t connection_index)>;
  using ResultSink = std::function<void(const SessionResult&)>;

  PolicyServer(ConfigFactory factory, ServerOptions options, ResultSink sink = {});
  ~PolicyServer();
  PolicyServer(const PolicyServer&) = delete;
  PolicyServer& operator=(const PolicyServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }

  // Accepts connections until stop() or max_sessions is reached, then
  // waits for the running sessions.
  void serve();
  void stop() noexcept { stopping_ = true; }

  std::size_t sessions_started() const noexcept { return started_; }

 private:
  void handle(int fd, std::uint64_t index);

  ConfigFactory factory_;
  ServerOptions options_;
  ResultSink sink_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::atomic<std::size_t> started_{0};
  TimerRegistry registry_;
  std::mutex sink_mu_;
  std::vector<std::thread> workers_;
};

}  // namespace timely
