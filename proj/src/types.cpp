// Copyright 2026 The LOA Toolkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "loa/types.hpp"

#include <algorithm>
#include <cmath>

namespace loa {

std::string_view to_string(LoaLevel level) {
  switch (level) {
    case LoaLevel::A0: return "A0";
    case LoaLevel::A1: return "A1";
    case LoaLevel::A2: return "A2";
  }
  return "?";
}

std::string_view to_string(ShiftDirection dir) { return dir == ShiftDirection::Up ? "up" : "down"; }

std::string_view to_string(ShiftSource src) {
  return src == ShiftSource::Human ? "human" : "autonomy";
}

LoaLevel parse_level(std::string_view s) {
  if (s == "A0") return LoaLevel::A0;
  if (s == "A1") return LoaLevel::A1;
  if (s == "A2") return LoaLevel::A2;
  throw Error("unknown LOA level '" + std::string(s) + "'");
}

ShiftDirection parse_direction(std::string_view s) {
  if (s == "up") return ShiftDirection::Up;
  if (s == "down") return ShiftDirection::Down;
  throw Error("unknown shift direction '" + std::string(s) + "'");
}

ShiftSource parse_source(std::string_view s) {
  if (s == "human") return ShiftSource::Human;
  if (s == "autonomy") return ShiftSource::Autonomy;
  throw Error("unknown shift source '" + std::string(s) + "'");
}

std::optional<LoaLevel> shifted(LoaLevel level, ShiftDirection dir) {
  const int next = index(level) + (dir == ShiftDirection::Up ? 1 : -1);
  if (next < 0 || next >= kNumLevels) return std::nullopt;
  return static_cast<LoaLevel>(next);
}

VelocityCommand clamp_to_limits(VelocityCommand u, const VelocityLimits& limits) {
  return {std::clamp(u.v, -limits.v_max, limits.v_max),
          std::clamp(u.omega, -limits.omega_max, limits.omega_max)};
}

VelocityCommand joystick_to_velocity(const JoystickSample& s, const VelocityLimits& limits,
                                     double deadzone) {
  const double jx = std::clamp(s.j_x, -1.0, 1.0);
  const double jy = std::clamp(s.j_y, -1.0, 1.0);
  if (std::hypot(jx, jy) < deadzone) return {};
  return {jy * limits.v_max, -jx * limits.omega_max};
}

SlidingWindow window_at(std::span<const TickRecord> stream, double t_end, double duration) {
  // Slack keeps tick times built as k * dt on the intended side of the edges.
  constexpr double kSlack = 1e-9;
  if (duration <= 0.0) return {duration, {}};
  const double t_begin = t_end - duration;
  auto first = std::upper_bound(stream.begin(), stream.end(), t_begin + kSlack,
                                [](double t, const TickRecord& r) { return t < r.t; });
  auto last = std::upper_bound(first, stream.end(), t_end + kSlack,
                               [](double t, const TickRecord& r) { return t < r.t; });
  return {duration, stream.subspan(static_cast<std::size_t>(first - stream.begin()),
                                   static_cast<std::size_t>(last - first))};
}

}  // namespace loa
