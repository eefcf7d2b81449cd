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
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "timely/envsim/tool_result.hpp"

namespace timely {

struct Transition {
  std::string action;  // normalized phrase
  std::string next;
  std::int64_t score_delta = 0;
  std::string message;
  bool once = false;
};

struct GameRoom {
  std::string id;
  std::string description;
  std::vector<Transition> transitions;  // file order
  bool terminal = false;
  // Score-maximizing action for this room. Only scripted policies see it.
  std::optional<std::string> best_action;
};

/// A finite-state interactive-fiction game.
///
/// Loaded from JSON and validated up front: the start room and every
/// transition target exist, and the score reachable from the start can
/// cover max_score.
class GameSpec {
 public:
  GameSpec(std::string name, std::vector<GameRoom> rooms, std::string start, std::int64_t max_score);

  const std::string& name() const noexcept { return name_; }
  const std::vector<GameRoom>& rooms() const noexcept { return rooms_; }
  const std::string& start() const noexcept { return start_; }
  std::int64_t max_score() const noexcept { return max_score_; }

  // Throws InvalidArgument for an unknown id.
  const GameRoom& room(std::string_view id) const;
  bool has_room(std::string_view id) const;

 private:
  std::string name_;
  std::vector<GameRoom> rooms_;
  std::unordered_map<std::string, std::size_t> index_;
  std::string start_;
  std::int64_t max_score_;
};

struct GameState {
  std::string current;
  std::int64_t score = 0;
  std::set<std::pair<std::string, std::string>> fired_once;
  std::int64_t steps_taken = 0;
  bool ended = false;

  friend bool operator==(const GameState&, const GameState&) = default;
};

// Parses and validates a game document. Throws ParseError (with byte
// offset) for malformed JSON and ValidationError naming the offender for
// structural problems.
GameSpec load_game_spec(std::string_view bytes);
GameSpec load_game_spec_file(const std::string& path);

GameState new_game(const GameSpec& spec);

// Applies one action. Unknown actions are a no-op with a fixed message.
// Throws GameOver when the game has already ended. The returned
// tool_latency is zero; latency is injected by the session.
std::pair<GameState, ToolResult> game_step(const GameSpec& spec, const GameState& state, std::string_view action);

// Transition phrases of the current room in file order; empty in a
// terminal room. Throws GameOver when the game has ended.
std::vector<std::string> valid_actions(const GameSpec& spec, const GameState& state);

inline std::int64_t game_score(const GameState& state) noexcept { return state.score; }
inline std::int64_t game_max_score(const GameSpec& spec) noexcept { return spec.max_score(); }

// Idempotent.
GameState end_game(GameState state);

// True when some transition reachable from the current room would still
// add score.
bool positive_score_reachable(const GameSpec& spec, const GameState& state);

// Lowercase, trimmed, internal whitespace collapsed to single spaces.
std::string normalize_phrase(std::string_view text);

inline constexpr std::string_view kNothingHappens = "Nothing happens.";

}  // namespace timely
