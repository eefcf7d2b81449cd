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

#include <cstddef>
#include <cstdint>
#include <random>

namespace timely {

// Deterministic random source owned by a single session.
//
// Backed by std::mt19937_64, whose output sequence is fixed by the standard.
// Derived draws (ranges, reals) are computed here instead of through the
// standard distributions so a seed reproduces the same values on any
// standard library.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  // Number of raw 64-bit words consumed so far.
  std::uint64_t position() const noexcept { return position_; }

  std::uint64_t next_u64();
  // Uniform integer in [lo, hi], unbiased (rejection sampling).
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  // Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n);
  // Uniform real in [0, 1) with 53 bits of precision.
  double uniform01();
  bool bernoulli(double p);

 private:
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  std::mt19937_64 engine_;
};

// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;
// Order-sensitive combination of a seed with one more coordinate.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t value) noexcept;

}  // namespace timely
