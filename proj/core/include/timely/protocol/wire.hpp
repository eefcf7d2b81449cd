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
#include <deque>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "timely/session/policy.hpp"

namespace timely {

inline constexpr std::string_view kProtocolVersion = "timely/1";

// `hello` and `error` frame the connection; the other kinds carry a session.
enum class MessageKind { hello, observation, policy_output, tool_response, session_end, error };

const char* to_string(MessageKind kind) noexcept;
MessageKind message_kind_from_string(const std::string& name);

struct WireMessage {
  MessageKind kind = MessageKind::observation;
  std::string session_id;
  std::uint64_t seq = 0;
  nlohmann::json payload = nlohmann::json::object();
  // Top-level fields this version does not know about, kept verbatim.
  nlohmann::json extra = nlohmann::json::object();

  friend bool operator==(const WireMessage&, const WireMessage&) = default;
};

// One JSON document terminated by '\n'.
std::string encode_message(const WireMessage& msg);

// Accepts a single line with or without its terminator. Throws
// ProtocolError with the byte offset of the first bad byte.
WireMessage decode_message(std::string_view line);

/// Splits an arbitrarily chunked byte stream into lines.
class LineFramer {
 public:
  void feed(std::string_view bytes);
  std::optional<std::string> next_line();
  std::size_t buffered_bytes() const noexcept { return partial_.size(); }

 private:
  std::string partial_;
  std::deque<std::string> ready_;
};

// Observation payloads never include oracle hints.
nlohmann::json observation_payload(const Observation& obs);
Observation observation_from_message(const WireMessage& msg);
WireMessage observation_message(const Observation& obs);

nlohmann::json policy_output_payload(const PolicyOutput& out);
PolicyOutput policy_output_from_payload(const nlohmann::json& payload);

}  // namespace timely
