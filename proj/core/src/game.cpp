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

#include "timely/envsim/game.hpp"

#include <algorithm>
#include <cctype>
#include <deque>

#include <nlohmann/json.hpp>

#include "io_util.hpp"
#include "timely/timecore/errors.hpp"

namespace timely {

namespace {

using ordered_json = nlohmann::ordered_json;

template <typename T>
T field(const ordered_json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(where + ": field '" + key + "' has the wrong type");
  }
}

template <typename T>
T field_or(const ordered_json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return field<T>(j, key, where);
}

}  // namespace

std::string normalize_phrase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

GameSpec::GameSpec(std::string name, std::vector<GameRoom> rooms, std::string start, std::int64_t max_score)
    : name_(std::move(name)), rooms_(std::move(rooms)), start_(std::move(start)), max_score_(max_score) {
  const std::string where = "game '" + name_ + "'";
  if (rooms_.empty()) throw ValidationError(where + ": states must not be empty");
  if (max_score_ <= 0) throw ValidationError(where + ": max_score must be positive");
  for (std::size_t i = 0; i < rooms_.size(); ++i) {
    if (!index_.emplace(rooms_[i].id, i).second) {
      throw ValidationError(where + ": duplicate state '" + rooms_[i].id + "'");
    }
  }
  if (!has_room(start_)) throw ValidationError(where + ": start state '" + start_ + "' does not exist");

  for (const auto& room : rooms_) {
    std::set<std::string> seen;
    for (const auto& t : room.transitions) {
      if (!has_room(t.next)) {
        throw ValidationError(where + ": transition '" + t.action + "' in state '" + room.id +
                              "' targets missing state '" + t.next + "'");
      }
      if (!seen.insert(t.action).second) {
        throw ValidationError(where + ": duplicate action '" + t.action + "' in state '" + room.id + "'");
      }
    }
    if (room.best_action) {
      const bool known = std::any_of(room.transitions.begin(), room.transitions.end(),
                                     [&](const Transition& t) { return t.action == *room.best_action; });
      if (!known) {
        throw ValidationError(where + ": best_action '" + *room.best_action + "' in state '" + room.id +
                              "' is not one of its transitions");
      }
    }
  }

  // Score potential over rooms reachable from the start: a repeatable
  // positive transition makes any target reachable, otherwise the one-time
  // positive deltas must add up to max_score.
  std::vector<bool> visited(rooms_.size(), false);
  std::deque<std::size_t> queue{index_.at(start_)};
  visited[queue.front()] = true;
  std::int64_t potential = 0;
  bool unbounded = false;
  while (!queue.empty()) {
    const GameRoom& room = rooms_[queue.front()];
    queue.pop_front();
    if (room.terminal) continue;
    for (const auto& t : room.transitions) {
      if (t.score_delta > 0) {
        if (t.once) {
          potential += t.score_delta;
        } else {
          unbounded = true;
        }
      }
      const std::size_t next = index_.at(t.next);
      if (!visited[next]) {
        visited[next] = true;
        queue.push_back(next);
      }
    }
  }
  if (!unbounded && potential < max_score_) {
    throw ValidationError(where + ": max_score " + std::to_string(max_score_) +
                          " is unreachable; reachable one-time score totals " + std::to_string(potential));
  }
}

const GameRoom& GameSpec::room(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw InvalidArgument("unknown state '" + std::string(id) + "'");
  return rooms_[it->second];
}

bool GameSpec::has_room(std::string_view id) const {
  return index_.contains(std::string(id));
}

GameSpec load_game_spec(std::string_view bytes) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("game spec: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ParseError("game spec: top level must be an object", 0);

  const auto name = field<std::string>(doc, "name", "game spec");
  const std::string where = "game '" + name + "'";
  const auto& states = doc.contains("states") ? doc.at("states") : ordered_json();
  if (!states.is_object() || states.empty()) throw ValidationError(where + ": states must be a non-empty object");

  std::vector<GameRoom> rooms;
  for (const auto& [id, body] : states.items()) {
    const std::string room_where = where + " state '" + id + "'";
    GameRoom room;
    room.id = id;
    room.description = field_or<std::string>(body, "description", "", room_where);
    room.terminal = field_or<bool>(body, "terminal", false, room_where);
    if (body.contains("best_action") && !body.at("best_action").is_null()) {
      room.best_action = normalize_phrase(field<std::string>(body, "best_action", room_where));
    }
    if (body.contains("transitions")) {
      const auto& transitions = body.at("transitions");
      if (!transitions.is_object()) throw ValidationError(room_where + ": transitions must be an object");
      for (const auto& [action, t] : transitions.items()) {
        const std::string t_where = room_where + " action '" + action + "'";
        room.transitions.push_back(Transition{
            normalize_phrase(action),
            field<std::string>(t, "next", t_where),
            field_or<std::int64_t>(t, "score_delta", 0, t_where),
            field_or<std::string>(t, "message", "", t_where),
            field_or<bool>(t, "once", false, t_where),
        });
      }
    }
    rooms.push_back(std::move(room));
  }
  return GameSpec(name, std::move(rooms), field<std::string>(doc, "start", where),
                  field<std::int64_t>(doc, "max_score", where));
}

GameSpec load_game_spec_file(const std::string& path) {
  return load_game_spec(detail::read_file(path));
}

GameState new_game(const GameSpec& spec) {
  GameState state;
  state.current = spec.start();
  return state;
}

std::pair<GameState, ToolResult> game_step(const GameSpec& spec, const GameState& state, std::string_view action) {
  if (state.ended) throw GameOver("the game has ended");
  GameState next = state;
  ++next.steps_taken;
  ToolResult result;

  const std::string phrase = normalize_phrase(action);
  const GameRoom& room = spec.room(state.current);
  const auto it = std::find_if(room.transitions.begin(), room.transitions.end(),
                               [&](const Transition& t) { return t.action == phrase; });
  if (room.terminal || it == room.transitions.end()) {
    result.text = std::string(kNothingHappens);
    return {std::move(next), std::move(result)};
  }

  std::int64_t delta = it->score_delta;
  if (it->once && !next.fired_once.emplace(room.id, it->action).second) delta = 0;
  const std::int64_t before = next.score;
  next.score = std::clamp<std::int64_t>(before + delta, 0, spec.max_score());
  next.current = it->next;

  result.text = it->message;
  result.score_delta = next.score - before;
  if (spec.room(next.current).terminal) {
    next.ended = true;
    result.terminal = true;
  }
  return {std::move(next), std::move(result)};
}

std::vector<std::string> valid_actions(const GameSpec& spec, const GameState& state) {
  if (state.ended) throw GameOver("the game has ended");
  const GameRoom& room = spec.room(state.current);
  std::vector<std::string> out;
  if (room.terminal) return out;
  out.reserve(room.transitions.size());
  for (const auto& t : room.transitions) out.push_back(t.action);
  return out;
}

GameState end_game(GameState state) {
  state.ended = true;
  return state;
}

bool positive_score_reachable(const GameSpec& spec, const GameState& state) {
  if (state.ended || state.score >= spec.max_score()) return false;
  std::set<std::string> visited{state.current};
  std::deque<std::string> queue{state.current};
  while (!queue.empty()) {
    const GameRoom& room = spec.room(queue.front());
    queue.pop_front();
    if (room.terminal) continue;
    for (const auto& t : room.transitions) {
      if (t.score_delta > 0 && !(t.once && state.fired_once.contains({room.id, t.action}))) return true;
      if (visited.insert(t.next).second) queue.push_back(t.next);
    }
  }
  return false;
}

}  // namespace timely
