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

#ifndef LOA_TYPES_HPP_
#define LOA_TYPES_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace loa {

// Thrown for invalid inputs and configurations across the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Discrete levels of autonomy, ordered by control authority handed to the
// autonomy: A0 teleoperation, A1 autonomous stopping, A2 blended control.
enum class LoaLevel : int { A0 = 0, A1 = 1, A2 = 2 };

inline constexpr int kNumLevels = 3;

enum class ShiftDirection { Up, Down };
enum class ShiftSource { Human, Autonomy };

std::string_view to_string(LoaLevel level);
std::string_view to_string(ShiftDirection dir);
std::string_view to_string(ShiftSource src);
LoaLevel parse_level(std::string_view s);
ShiftDirection parse_direction(std::string_view s);
ShiftSource parse_source(std::string_view s);

inline int index(LoaLevel level) { return static_cast<int>(level); }

// Level one step up/down, or nullopt when it would leave A0..A2.
std::optional<LoaLevel> shifted(LoaLevel level, ShiftDirection dir);

struct JoystickSample {
  double t = 0.0;
  double j_x = 0.0;
  double j_y = 0.0;
};

// Linear and rotational velocity pair, used for human, autonomy and
// executed commands alike.
struct VelocityCommand {
  double v = 0.0;
  double omega = 0.0;

  Eigen::Vector2d vec() const { return {v, omega}; }
  static VelocityCommand from(const Eigen::Vector2d& x) { return {x(0), x(1)}; }

  friend bool operator==(const VelocityCommand&, const VelocityCommand&) = default;
};

inline VelocityCommand operator+(VelocityCommand a, VelocityCommand b) {
  return {a.v + b.v, a.omega + b.omega};
}
inline VelocityCommand operator-(VelocityCommand a, VelocityCommand b) {
  return {a.v - b.v, a.omega - b.omega};
}
inline VelocityCommand operator*(double s, VelocityCommand a) {
  return {s * a.v, s * a.omega};
}

struct VelocityLimits {
  double v_max = 1.0;
  double omega_max = 1.0;
};

VelocityCommand clamp_to_limits(VelocityCommand u, const VelocityLimits& limits);

struct ShiftEvent {
  double t = 0.0;
  ShiftDirection direction = ShiftDirection::Up;
  ShiftSource source = ShiftSource::Human;
  LoaLevel from_level = LoaLevel::A0;
  LoaLevel to_level = LoaLevel::A1;

  friend bool operator==(const ShiftEvent&, const ShiftEvent&) = default;
};

// One row of an episode log. `loa` is the level in force while this tick's
// executed command was produced; `shift`, when present, takes effect after
// the tick. `alert` names the audible notification raised on this tick
// ("shift" or "pause"), if any.
struct TickRecord {
  double t = 0.0;
  double j_x = 0.0;
  double j_y = 0.0;
  VelocityCommand u_h;
  VelocityCommand u_r;
  VelocityCommand u_c;
  LoaLevel loa = LoaLevel::A0;
  double d_min = 0.0;
  std::optional<ShiftEvent> shift;
  std::optional<std::string> alert;
  int course_id = 0;
  std::string operator_id;

  friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

// Non-owning view of the records falling inside a time window.
struct SlidingWindow {
  double duration = 0.0;
  std::span<const TickRecord> samples;

  bool empty() const { return samples.empty(); }
  std::size_t size() const { return samples.size(); }
};

inline constexpr double kDefaultDeadzone = 0.05;
inline constexpr double kDefaultTickDt = 0.05;

// Maps a joystick deflection to (v, omega). Inputs are clamped to the unit
// box; deflections with norm below `deadzone` map to zero. Forward stick
// drives forward, right stick turns clockwise.
VelocityCommand joystick_to_velocity(const JoystickSample& s, const VelocityLimits& limits,
                                     double deadzone = kDefaultDeadzone);

// Records with t in (t_end - duration, t_end] of an ordered stream.
SlidingWindow window_at(std::span<const TickRecord> stream, double t_end, double duration);

}  // namespace loa

#endif  // LOA_TYPES_HPP_
