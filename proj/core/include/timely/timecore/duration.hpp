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

#include <compare>
#include <cstdint>
#include <string>

namespace timely {

/// Non-negative span of virtual time with microsecond resolution.
///
/// All harness time arithmetic is exact integer arithmetic on microseconds.
/// Conversions from decimal seconds round to the nearest microsecond with
/// ties away from zero. Addition throws OverflowError instead of wrapping,
/// and any operation that would produce a negative span throws
/// InvalidArgument.
class Duration {
 public:
  constexpr Duration() noexcept = default;

  static constexpr Duration zero() noexcept { return Duration{}; }
  static Duration from_micros(std::int64_t us);
  static Duration from_millis(std::int64_t ms);
  static Duration from_seconds(double seconds);

  constexpr std::int64_t micros() const noexcept { return us_; }
  double seconds() const noexcept { return static_cast<double>(us_) / 1e6; }
  constexpr bool is_zero() const noexcept { return us_ == 0; }

  friend Duration operator+(Duration a, Duration b);
  Duration& operator+=(Duration other);
  // Throws InvalidArgument when b > a.
  friend Duration operator-(Duration a, Duration b);

  friend constexpr auto operator<=>(Duration, Duration) noexcept = default;
  friend constexpr bool operator==(Duration, Duration) noexcept = default;

 private:
  explicit constexpr Duration(std::int64_t us) noexcept : us_(us) {}
  std::int64_t us_ = 0;
};

// Multiplies by a non-negative factor, rounding to the nearest microsecond
// (ties away from zero).
Duration scale(Duration d, double factor);

// Lossless decimal rendering, e.g. "6.3", "5.000001", "0.0".
std::string format_seconds(Duration d);

// Two-decimal rendering used in tool response text, e.g. "4.60".
std::string format_seconds_2dp(std::int64_t micros);
inline std::string format_seconds_2dp(Duration d) { return format_seconds_2dp(d.micros()); }

namespace duration_literals {

inline Duration operator""_us(unsigned long long v) { return Duration::from_micros(static_cast<std::int64_t>(v)); }
inline Duration operator""_ms(unsigned long long v) { return Duration::from_millis(static_cast<std::int64_t>(v)); }
inline Duration operator""_s(unsigned long long v) { return Duration::from_micros(static_cast<std::int64_t>(v) * 1'000'000); }
inline Duration operator""_s(long double v) { return Duration::from_seconds(static_cast<double>(v)); }

}  // namespace duration_literals

}  // namespace timely
