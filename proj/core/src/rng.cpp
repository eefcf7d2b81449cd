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

#include "timely/timecore/rng.hpp"

#include <limits>

#include "timely/timecore/errors.hpp"

namespace timely {

std::uint64_t SeededRng::next_u64() {
  ++position_;
  return engine_();
}

std::int64_t SeededRng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw InvalidArgument("uniform_int requires lo <= hi");
  const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == std::numeric_limits<std::uint64_t>::max()) {
    return static_cast<std::int64_t>(next_u64());
  }
  const std::uint64_t range = span + 1;
  // Largest multiple of range that fits; values above it are rejected.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              (std::numeric_limits<std::uint64_t>::max() % range + 1) % range;
  std::uint64_t draw = next_u64();
  while (draw > limit) draw = next_u64();
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + draw % range);
}

std::size_t SeededRng::index(std::size_t n) {
  if (n == 0) throw InvalidArgument("index requires n > 0");
  return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1));
}

double SeededRng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

bool SeededRng::bernoulli(double p) {
  if (p >= 1.0) {
    next_u64();
    return true;
  }
  return uniform01() < p;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) noexcept {
  return mix64(seed ^ mix64(value + 0x632BE59BD9B4E019ULL));
}

}  // namespace timely
