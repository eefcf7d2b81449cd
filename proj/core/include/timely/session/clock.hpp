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

#include <chrono>
#include <thread>

#include "timely/timecore/duration.hpp"

namespace timely {

// Where session time goes once a step is accounted for. Virtual time
// advances instantly; real time sleeps for the step's duration.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual void advance(Duration d) = 0;
};

class VirtualClock final : public Clock {
 public:
  void advance(Duration) override {}
};

class RealClock final : public Clock {
 public:
  void advance(Duration d) override { std::this_thread::sleep_for(std::chrono::microseconds(d.micros())); }
};

}  // namespace timely
