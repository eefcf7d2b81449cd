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

#include "timely/protocol/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "timely/timecore/errors.hpp"

namespace timely {

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

WireMessage receive_message(LineChannel& channel) { return decode_message(channel.receive_line()); }

void send_message(LineChannel& channel, const WireMessage& msg) { channel.send_line(encode_message(msg)); }

}  // namespace

FdChannel::FdChannel(int read_fd, int write_fd, bool owns) : read_fd_(read_fd), write_fd_(write_fd), owns_(owns) {}

FdChannel::~FdChannel() {
  if (!owns_) return;
  if (read_fd_ >= 0) ::close(read_fd_);
  if (write_fd_ >= 0 && write_fd_ != read_fd_) ::close(write_fd_);
}

void FdChannel::close_write() {
  if (write_fd_ < 0) return;
  if (write_fd_ == read_fd_) {
    ::shutdown(write_fd_, SHUT_WR);
  } else if (owns_) {
    ::close(write_fd_);
  }
  write_fd_ = -1;
}

void FdChannel::send_line(const std::string& line) {
  if (write_fd_ < 0) throw IoError("channel is closed for writing");
  std::size_t sent = 0;
  while (sent < line.size()) {
    const ssize_t n = ::send(write_fd_, line.data() + sent, line.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == ENOTSOCK) {
      const ssize_t w = ::write(write_fd_, line.data() + sent, line.size() - sent);
      if (w < 0) {
        if (errno == EINTR) continue;
        throw IoError(errno_text("write"));
      }
      sent += static_cast<std::size_t>(w);
      continue;
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError(errno_text("send"));
    }
    sent += static_cast<std::size_t>(n);
  }
}

std::string FdChannel::receive_line() {
  char buf[4096];
  for (;;) {
    if (auto line = framer_.next_line()) return *line;
    const ssize_t n = ::read(read_fd_, buf, sizeof(buf));
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError(errno_text("read"));
    }
    if (n == 0) throw IoError("peer closed the channel");
    framer_.feed(std::string_view(buf, static_cast<std::size_t>(n)));
  }
}

int connect_tcp(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  const std::string service = std::to_string(port);
  if (const int rc = ::getaddrinfo(host.c_str(), service.c_str(), &hints, &res); rc != 0) {
    throw IoError("resolve " + host + ": " + ::gai_strerror(rc));
  }
  int fd = -1;
  for (addrinfo* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd < 0) throw IoError("connect " + host + ":" + service + " failed");
  return fd;
}

nlohmann::json hello_payload() { return {{"protocol", kProtocolVersion}}; }

void accept_handshake(LineChannel& channel, const std::string& session_id, const nlohmann::json& server_info) {
  const WireMessage hello = receive_message(channel);
  const std::string version =
      hello.payload.is_object() ? hello.payload.value("protocol", std::string()) : std::string();
  WireMessage reply;
  reply.session_id = session_id;
  if (hello.kind != MessageKind::hello || version != kProtocolVersion) {
    reply.kind = MessageKind::error;
    reply.payload = {{"message", "unsupported protocol '" + version + "', expected '" +
                                     std::string(kProtocolVersion) + "'"}};
    send_message(channel, reply);
    throw ProtocolError("handshake rejected: client protocol '" + version + "'", 0);
  }
  reply.kind = MessageKind::hello;
  reply.payload = server_info;
  reply.payload["protocol"] = kProtocolVersion;
  send_message(channel, reply);
}

PolicyOutput RemotePolicy::respond(const Observation& observation) {
  session_id_ = observation.session_id;
  send_message(channel_, observation_message(observation));
  const WireMessage reply = receive_message(channel_);
  if (reply.kind == MessageKind::error) {
    throw PolicyError("policy reported an error: " + reply.payload.value("message", std::string("unspecified")));
  }
  if (reply.kind != MessageKind::policy_output) {
    throw ProtocolError(std::string("expected policy_output, got ") + to_string(reply.kind), 0);
  }
  if (reply.seq != observation.seq) {
    throw ProtocolError("policy_output seq " + std::to_string(reply.seq) + " does not answer observation seq " +
                            std::to_string(observation.seq),
                        0);
  }
  return policy_output_from_payload(reply.payload);
}

void RemotePolicy::on_session_end(const nlohmann::json& summary) {
  WireMessage msg;
  msg.kind = MessageKind::session_end;
  msg.session_id = summary.value("session_id", session_id_);
  msg.payload = summary;
  send_message(channel_, msg);
}

SubprocessPolicy::SubprocessPolicy(std::vector<std::string> argv, std::string session_id,
                                   nlohmann::json server_info) {
  if (argv.empty()) throw InvalidArgument("subprocess policy needs a command");
  int to_child[2];
  int from_child[2];
  if (::pipe(to_child) != 0) throw IoError(errno_text("pipe"));
  if (::pipe(from_child) != 0) {
    ::close(to_child[0]);
    ::close(to_child[1]);
    throw IoError(errno_text("pipe"));
  }
  std::vector<char*> args;
  for (auto& a : argv) args.push_back(a.data());
  args.push_back(nullptr);

  pid_ = ::fork();
  if (pid_ < 0) throw IoError(errno_text("fork"));
  if (pid_ == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    ::close(to_child[0]);
    ::close(to_child[1]);
    ::close(from_child[0]);
    ::close(from_child[1]);
    ::execvp(args[0], args.data());
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  channel_ = std::make_unique<FdChannel>(from_child[0], to_child[1]);
  remote_ = std::make_unique<RemotePolicy>(*channel_);
  try {
    accept_handshake(*channel_, session_id, server_info);
  } catch (...) {
    channel_.reset();
    wait();
    throw;
  }
}

SubprocessPolicy::~SubprocessPolicy() {
  channel_.reset();
  if (pid_ > 0 && !status_) {
    ::kill(pid_, SIGTERM);
    wait();
  }
}

PolicyOutput SubprocessPolicy::respond(const Observation& observation) { return remote_->respond(observation); }

void SubprocessPolicy::on_session_end(const nlohmann::json& summary) {
  remote_->on_session_end(summary);
  channel_->close_write();
}

int SubprocessPolicy::wait() {
  if (status_) return *status_;
  int status = 0;
  while (::waitpid(pid_, &status, 0) < 0) {
    if (errno != EINTR) throw IoError(errno_text("waitpid"));
  }
  status_ = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return *status_;
}

nlohmann::json run_policy_client(Policy& policy, LineChannel& channel) {
  WireMessage hello;
  hello.kind = MessageKind::hello;
  hello.payload = hello_payload();
  send_message(channel, hello);

  const WireMessage reply = receive_message(channel);
  if (reply.kind == MessageKind::error) {
    throw ProtocolError("server rejected handshake: " + reply.payload.value("message", std::string()), 0);
  }
  if (reply.kind != MessageKind::hello || reply.payload.value("protocol", std::string()) != kProtocolVersion) {
    throw ProtocolError("unexpected handshake reply", 0);
  }

  for (;;) {
    const WireMessage msg = receive_message(channel);
    switch (msg.kind) {
      case MessageKind::observation:
      case MessageKind::tool_response: {
        const Observation obs = observation_from_message(msg);
        WireMessage out;
        out.kind = MessageKind::policy_output;
        out.session_id = msg.session_id;
        out.seq = msg.seq;
        try {
          out.payload = policy_output_payload(policy.respond(obs));
        } catch (const std::exception& e) {
          out.kind = MessageKind::error;
          out.payload = {{"message", e.what()}};
        }
        send_message(channel, out);
        break;
      }
      case MessageKind::session_end:
        policy.on_session_end(msg.payload);
        return msg.payload;
      case MessageKind::error:
        throw ProtocolError("server error: " + msg.payload.value("message", std::string()), 0);
      default:
        throw ProtocolError(std::string("unexpected message ") + to_string(msg.kind), 0);
    }
  }
}

}  // namespace timely
