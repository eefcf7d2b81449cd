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

#include "timely/timecore/duration.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "timely/timecore/errors.hpp"

namespace timely {

namespace {

constexpr std::int64_t kMicrosPerSecond = 1'000'000;
constexpr double kMaxMicros = 9.2e18;

std::int64_t round_micros(double us) {
  if (!std::isfinite(us) || std::fabs(us) >= kMaxMicros) {
    throw OverflowError("duration out of range");
  }
  return std::llround(us);
}

}  // namespace

Duration Duration::from_micros(std::int64_t us) {
  if (us < 0) throw InvalidArgument("duration must be non-negative, got " + std::to_string(us) + "us");
  return Duration{us};
}

Duration Duration::from_millis(std::int64_t ms) {
  if (ms > std::numeric_limits<std::int64_t>::max() / 1000) throw OverflowError("duration out of range");
  return from_micros(ms * 1000);
}

Duration Duration::from_seconds(double seconds) {
  return from_micros(round_micros(seconds * 1e6));
}

Duration operator+(Duration a, Duration b) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a.us_, b.us_, &out)) throw OverflowError("duration addition overflow");
  return Duration{out};
}

Duration& Duration::operator+=(Duration other) {
  *this = *this + other;
  return *this;
}

Duration operator-(Duration a, Duration b) {
  if (b.us_ > a.us_) throw InvalidArgument("duration subtraction would go negative");
  return Duration{a.us_ - b.us_};
}

Duration scale(Duration d, double factor) {
  if (!(factor >= 0.0)) throw InvalidArgument("scale factor must be non-negative");
  return Duration::from_micros(round_micros(static_cast<double>(d.micros()) * factor));
}

std::string format_seconds(Duration d) {
  const std::int64_t whole = d.micros() / kMicrosPerSecond;
  std::int64_t frac = d.micros() % kMicrosPerSecond;
  if (frac == 0) return std::to_string(whole) + ".0";
  char buf[8];
  std::snprintf(buf, sizeof(buf), "%06lld", static_cast<long long>(frac));
  std::string digits(buf);
  while (digits.back() == '0') digits.pop_back();
  return std::to_string(whole) + "." + digits;
}

std::string format_seconds_2dp(std::int64_t micros) {
  const bool negative = micros < 0;
  const std::int64_t mag = negative ? -micros : micros;
  // Round to centiseconds, ties away from zero.
  const std::int64_t centis = (mag + 5'000) / 10'000;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%s%lld.%02lld", negative && centis != 0 ? "-" : "",
                static_cast<long long>(centis / 100), static_cast<long long>(centis % 100));
  return buf;
}

}  // namespace timely
