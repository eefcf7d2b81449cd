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

#include "timely/protocol/wire.hpp"

#include "json_util.hpp"
#include "timely/timecore/errors.hpp"

namespace timely {

namespace {

constexpr const char* kKinds[] = {"hello", "observation", "policy_output", "tool_response", "session_end", "error"};

Observation::Kind observation_kind_from_string(const std::string& name) {
  for (auto k : {Observation::Kind::initial, Observation::Kind::tool_response, Observation::Kind::continuation}) {
    if (name == to_string(k)) return k;
  }
  throw ProtocolError("unknown observation kind '" + name + "'", 0);
}

}  // namespace

const char* to_string(MessageKind kind) noexcept { return kKinds[static_cast<int>(kind)]; }

MessageKind message_kind_from_string(const std::string& name) {
  for (int i = 0; i < 6; ++i) {
    if (name == kKinds[i]) return static_cast<MessageKind>(i);
  }
  throw ProtocolError("unknown message kind '" + name + "'", 0);
}

std::string encode_message(const WireMessage& msg) {
  nlohmann::json j = msg.extra.is_object() ? msg.extra : nlohmann::json::object();
  j["kind"] = to_string(msg.kind);
  j["session_id"] = msg.session_id;
  j["seq"] = msg.seq;
  j["payload"] = msg.payload;
  std::string line = j.dump();
  line += '\n';
  return line;
}

WireMessage decode_message(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  if (line.find('\n') != std::string_view::npos) {
    throw ProtocolError("message spans more than one line", line.find('\n'));
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t offset = e.byte == 0 ? 0 : e.byte - 1;
    throw ProtocolError(std::string("malformed message: ") + e.what(), offset);
  }
  if (!j.is_object()) throw ProtocolError("message is not a JSON object", 0);

  WireMessage msg;
  try {
    msg.kind = message_kind_from_string(j.at("kind").get<std::string>());
    msg.session_id = j.value("session_id", std::string());
    msg.seq = j.value("seq", std::uint64_t{0});
    msg.payload = j.value("payload", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("message envelope: ") + e.what(), 0);
  }
  for (const char* key : {"kind", "session_id", "seq", "payload"}) j.erase(key);
  msg.extra = std::move(j);
  return msg;
}

void LineFramer::feed(std::string_view bytes) {
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) {
      partial_.append(bytes.substr(pos));
      return;
    }
    partial_.append(bytes.substr(pos, nl - pos));
    ready_.push_back(std::move(partial_));
    partial_.clear();
    pos = nl + 1;
  }
}

std::optional<std::string> LineFramer::next_line() {
  if (ready_.empty()) return std::nullopt;
  std::string line = std::move(ready_.front());
  ready_.pop_front();
  return line;
}

nlohmann::json observation_payload(const Observation& obs) {
  nlohmann::json j = {{"kind", to_string(obs.kind)},
                      {"task", to_string(obs.task)},
                      {"turn", obs.turn},
                      {"text", obs.text},
                      {"time_limit_seconds", obs.time_limit_seconds}};
  if (obs.tool_name) j["tool_name"] = *obs.tool_name;
  if (obs.reported_elapsed) j["reported_elapsed"] = *obs.reported_elapsed;
  return j;
}

Observation observation_from_message(const WireMessage& msg) {
  if (msg.kind != MessageKind::observation && msg.kind != MessageKind::tool_response) {
    throw ProtocolError(std::string("expected an observation, got ") + to_string(msg.kind), 0);
  }
  const auto& p = msg.payload;
  Observation obs;
  obs.session_id = msg.session_id;
  obs.seq = msg.seq;
  try {
    obs.kind = observation_kind_from_string(p.at("kind").get<std::string>());
    obs.task = task_kind_from_string(p.at("task").get<std::string>());
    obs.turn = p.value("turn", std::size_t{0});
    obs.text = p.at("text").get<std::string>();
    obs.time_limit_seconds = p.value("time_limit_seconds", 0.0);
    if (p.contains("tool_name")) obs.tool_name = p.at("tool_name").get<std::string>();
    if (p.contains("reported_elapsed")) obs.reported_elapsed = p.at("reported_elapsed").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("observation payload: ") + e.what(), 0);
  } catch (const ValidationError& e) {
    throw ProtocolError(std::string("observation payload: ") + e.what(), 0);
  }
  return obs;
}

WireMessage observation_message(const Observation& obs) {
  WireMessage msg;
  msg.kind = obs.kind == Observation::Kind::tool_response ? MessageKind::tool_response : MessageKind::observation;
  msg.session_id = obs.session_id;
  msg.seq = obs.seq;
  msg.payload = observation_payload(obs);
  return msg;
}

nlohmann::json policy_output_payload(const PolicyOutput& out) {
  nlohmann::json j = {{"declared_gen_time_us", out.declared_gen_time.micros()}, {"body", out.body}};
  j["tool_call"] = out.tool_call ? nlohmann::json(*out.tool_call) : nlohmann::json(nullptr);
  return j;
}

PolicyOutput policy_output_from_payload(const nlohmann::json& payload) {
  PolicyOutput out;
  try {
    const auto gen = payload.at("declared_gen_time_us").get<std::int64_t>();
    if (gen < 0) throw ProtocolError("declared_gen_time_us must be non-negative", 0);
    out.declared_gen_time = Duration::from_micros(gen);
    out.body = payload.value("body", std::string());
    if (payload.contains("tool_call") && !payload.at("tool_call").is_null()) {
      out.tool_call = payload.at("tool_call").get<ToolCall>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProtocolError(std::string("policy_output payload: ") + e.what(), 0);
  } catch (const ValidationError& e) {
    throw ProtocolError(std::string("policy_output payload: ") + e.what(), 0);
  }
  return out;
}

}  // namespace timely
