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

#include "timely/protocol/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "timely/protocol/transport.hpp"
#include "timely/timecore/errors.hpp"

namespace timely {

PolicyServer::PolicyServer(ConfigFactory factory, ServerOptions options, ResultSink sink)
    : factory_(std::move(factory)), options_(std::move(options)), sink_(std::move(sink)) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
  const int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(options_.port);
  if (::inet_pton(AF_INET, options_.host.c_str(), &addr.sin_addr) != 1) {
    ::close(listen_fd_);
    throw InvalidArgument("server host must be an IPv4 address: " + options_.host);
  }
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0 || ::listen(listen_fd_, 16) != 0) {
    const std::string err = std::strerror(errno);
    ::close(listen_fd_);
    throw IoError("bind " + options_.host + ":" + std::to_string(options_.port) + ": " + err);
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

PolicyServer::~PolicyServer() {
  stopping_ = true;
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void PolicyServer::serve() {
  std::uint64_t index = 0;
  while (!stopping_) {
    if (options_.max_sessions != 0 && index >= options_.max_sessions) break;
    pollfd pfd{listen_fd_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, 100);
    if (ready <= 0) continue;
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) continue;
    ++started_;
    workers_.emplace_back(&PolicyServer::handle, this, fd, index++);
  }
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  workers_.clear();
}

void PolicyServer::handle(int fd, std::uint64_t index) {
  FdChannel channel(fd);
  const std::string session_id = "conn-" + std::to_string(index);
  try {
    SessionConfig config = factory_(index);
    nlohmann::json info = {{"session_id", session_id},
                           {"task", to_string(config.env.kind)},
                           {"tools", tool_schemas_json(config.env.kind)}};
    accept_handshake(channel, session_id, info);
    RemotePolicy policy(channel);
    RealClock real;
    SessionOptions opts{session_id, &registry_, options_.real_time ? &real : nullptr};
    const SessionResult result = run_session(policy, config, opts);
    if (sink_) {
      std::lock_guard<std::mutex> lock(sink_mu_);
      sink_(result);
    }
  } catch (const std::exception&) {
    // A broken connection ends only its own session.
  }
}

}  // namespace timely
