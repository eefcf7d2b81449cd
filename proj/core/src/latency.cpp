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

#include "timely/timecore/latency.hpp"

#include "timely/timecore/errors.hpp"
#include "json_util.hpp"

namespace timely {

LatencyModel LatencyModel::fixed(Duration d) {
  LatencyModel m;
  m.kind_ = Kind::fixed;
  m.lo_ = d;
  m.hi_ = d;
  return m;
}

LatencyModel LatencyModel::uniform(Duration lo, Duration hi) {
  if (lo > hi) throw InvalidArgument("uniform latency requires lo <= hi");
  LatencyModel m;
  m.kind_ = Kind::uniform;
  m.lo_ = lo;
  m.hi_ = hi;
  return m;
}

LatencyModel LatencyModel::per_action(std::vector<std::pair<std::string, LatencyModel>> entries,
                                      LatencyModel fallback) {
  LatencyModel m;
  m.kind_ = Kind::per_action;
  m.entries_ = std::move(entries);
  m.fallback_ = std::make_shared<const LatencyModel>(std::move(fallback));
  return m;
}

const LatencyModel& LatencyModel::fallback() const {
  static const LatencyModel kNone;
  return fallback_ ? *fallback_ : kNone;
}

const LatencyModel* LatencyModel::find(std::string_view action) const {
  for (const auto& [name, model] : entries_) {
    if (name == action) return &model;
  }
  return nullptr;
}

Duration sample_latency(const LatencyModel& model, std::string_view action_name, SeededRng& rng) {
  switch (model.kind()) {
    case LatencyModel::Kind::none:
      return Duration::zero();
    case LatencyModel::Kind::fixed:
      return model.fixed_value();
    case LatencyModel::Kind::uniform:
      return Duration::from_micros(rng.uniform_int(model.lo().micros(), model.hi().micros()));
    case LatencyModel::Kind::per_action:
      if (const auto* entry = model.find(action_name)) return sample_latency(*entry, action_name, rng);
      return sample_latency(model.fallback(), action_name, rng);
  }
  return Duration::zero();
}

void to_json(nlohmann::json& j, const LatencyModel& model) {
  switch (model.kind()) {
    case LatencyModel::Kind::none:
      j = {{"kind", "none"}};
      break;
    case LatencyModel::Kind::fixed:
      j = {{"kind", "fixed"}, {"d_us", model.fixed_value().micros()}};
      break;
    case LatencyModel::Kind::uniform:
      j = {{"kind", "uniform"}, {"lo_us", model.lo().micros()}, {"hi_us", model.hi().micros()}};
      break;
    case LatencyModel::Kind::per_action: {
      nlohmann::json map = nlohmann::json::object();
      for (const auto& [name, entry] : model.entries()) map[name] = entry;
      j = {{"kind", "per_action"}, {"map", map}, {"default", model.fallback()}};
      break;
    }
  }
}

void from_json(const nlohmann::json& j, LatencyModel& model) {
  const auto kind = detail::require<std::string>(j, "kind", "latency model");
  if (kind == "none") {
    model = LatencyModel::none();
  } else if (kind == "fixed") {
    model = LatencyModel::fixed(detail::require_duration(j, "d_us", "fixed latency"));
  } else if (kind == "uniform") {
    model = LatencyModel::uniform(detail::require_duration(j, "lo_us", "uniform latency"),
                                  detail::require_duration(j, "hi_us", "uniform latency"));
  } else if (kind == "per_action") {
    if (!j.contains("default")) throw ValidationError("per_action latency requires a default model");
    std::vector<std::pair<std::string, LatencyModel>> entries;
    if (j.contains("map")) {
      for (const auto& [name, entry] : j.at("map").items()) entries.emplace_back(name, entry.get<LatencyModel>());
    }
    model = LatencyModel::per_action(std::move(entries), j.at("default").get<LatencyModel>());
  } else {
    throw ValidationError("unknown latency model kind '" + kind + "'");
  }
}

}  // namespace timely
