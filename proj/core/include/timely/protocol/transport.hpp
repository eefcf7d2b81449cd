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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "timely/protocol/wire.hpp"
#include "timely/session/policy.hpp"

namespace timely {

/// A bidirectional stream of protocol lines.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void send_line(const std::string& line) = 0;
  // Blocks for the next complete line, without its terminator. Throws
  // IoError when the peer closes the stream.
  virtual std::string receive_line() = 0;
};

// Channel over POSIX file descriptors. A socket uses the same fd for both
// directions. Owned descriptors are closed on destruction.
class FdChannel final : public LineChannel {
 public:
  FdChannel(int read_fd, int write_fd, bool owns = true);
  explicit FdChannel(int socket_fd, bool owns = true) : FdChannel(socket_fd, socket_fd, owns) {}
  ~FdChannel() override;
  FdChannel(const FdChannel&) = delete;
  FdChannel& operator=(const FdChannel&) = delete;

  void send_line(const std::string& line) override;
  std::string receive_line() override;
  void close_write();

 private:
  int read_fd_;
  int write_fd_;
  bool owns_;
  LineFramer framer_;
};

// Connects to host:port over TCP and returns the socket fd.
int connect_tcp(const std::string& host, std::uint16_t port);

nlohmann::json hello_payload();

// Reads the client hello and answers it. On a version mismatch an error
// message is sent and ProtocolError is thrown.
void accept_handshake(LineChannel& channel, const std::string& session_id, const nlohmann::json& server_info);

/// Harness-side proxy for a policy living at the other end of a channel.
///
/// Each observation goes out as one message; the reply must be a
/// policy_output echoing its seq.
class RemotePolicy : public Policy {
 public:
  explicit RemotePolicy(LineChannel& channel) : channel_(channel) {}

  PolicyOutput respond(const Observation& observation) override;
  void on_session_end(const nlohmann::json& summary) override;

 private:
  LineChannel& channel_;
  std::string session_id_;
};

/// Spawns `argv` with pipes on its standard streams and drives it as a
/// policy. The child speaks the client side of the protocol.
class SubprocessPolicy final : public Policy {
 public:
  SubprocessPolicy(std::vector<std::string> argv, std::string session_id, nlohmann::json server_info);
  ~SubprocessPolicy() override;

  PolicyOutput respond(const Observation& observation) override;
  void on_session_end(const nlohmann::json& summary) override;

  // Waits for the child to exit and returns its status code.
  int wait();

 private:
  int pid_ = -1;
  std::unique_ptr<FdChannel> channel_;
  std::unique_ptr<RemotePolicy> remote_;
  std::optional<int> status_;
};

// The client side of a session: sends hello, then answers observations
// with `policy` until session_end. Returns the session summary.
nlohmann::json run_policy_client(Policy& policy, LineChannel& channel);

}  // namespace timely
