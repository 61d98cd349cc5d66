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

#ifndef LOA_SHARED_CONTROL_HPP_
#define LOA_SHARED_CONTROL_HPP_

#include <optional>
#include <utility>

#include "loa/simulator.hpp"
#include "loa/types.hpp"

namespace loa {

struct BlendingParams {
  double alpha = 0.5;  // weight on the human command
};

struct SafetyShiftParams {
  double delta_low = 0.65;   // m
  double delta_high = 0.75;  // m
  double tau = 3.0;          // s

  void validate() const;
};

struct LoaState {
  LoaLevel level = LoaLevel::A0;
  double below_timer = 0.0;
  double above_timer = 0.0;
};

// Pure pursuit toward a goal point plus a scan-based repulsion term.
//
//   err      = heading error to the goal
//   omega    = k_pursuit * err - k_turn * sum_i w_i * sin(a_i)
//   w_i      = ((influence - r_i) / influence)^2 for r_i < influence
//   v        = cruise * v_max * max(0, cos err) * slow
//   slow     = clamp((r_front - stop_distance) / (slow_distance - stop_distance), 0, 1)
//
// where a_i is beam i's angle relative to the heading and r_front the
// smallest range within +-front_half_angle of the heading. Output is clamped
// to the velocity limits.
struct PlannerParams {
  double cruise = 0.6;
  double k_pursuit = 1.2;
  double k_turn = 0.08;
  double influence = 1.5;
  double front_half_angle = 0.35;  // rad
  double stop_distance = 0.5;
  double slow_distance = 1.5;
};

VelocityCommand plan_autonomy_command(const Pose& pose, const LidarScan& scan, const Vec2d& goal,
                                      const VelocityLimits& limits,
                                      const PlannerParams& params = {});

// Forward-simulates u_h for `horizon` seconds in `step` increments against
// the map (dynamic obstacle advanced in time from t). Any predicted contact
// blocks the whole command.
VelocityCommand autonomous_stop_filter(const VelocityCommand& u_h, const Pose& pose,
                                       const CourseMap& map, double chair_radius, double t,
                                       double horizon = 1.0, double step = kDefaultTickDt);

// u_c = (1 - alpha) * u_r + alpha * u_h, per component.
VelocityCommand blend(const BlendingParams& p, const VelocityCommand& u_h, const VelocityCommand& u_r);

struct LoaContext {
  const CourseMap* map = nullptr;
  Pose pose;
  double t = 0.0;
  double chair_radius = 0.45;
  double stop_horizon = 1.0;
  double dt = kDefaultTickDt;
  BlendingParams blending;
};

// A0 passes u_h through; A1 applies the stop filter; A2 blends.
VelocityCommand apply_loa(LoaLevel level, const VelocityCommand& u_h, const VelocityCommand& u_r,
                          const LoaContext& ctx);

// Dwell-time shift requests from the nearest obstacle distance. Timers reset
// on entering the [delta_low, delta_high] band and when they fire.
std::pair<LoaState, std::optional<ShiftDirection>> safety_shift_monitor(
    LoaState state, double d_min, double dt, const SafetyShiftParams& p);

struct ArbitrationResult {
  LoaLevel level;
  std::optional<ShiftEvent> event;
};

// A human request, when present, wins and the autonomy request is dropped.
// Requests that would leave A0..A2 produce no event.
ArbitrationResult arbitrate_and_shift(LoaLevel level, std::optional<ShiftDirection> human_req,
                                      std::optional<ShiftDirection> autonomy_req, double t);

}  // namespace loa

#endif  // LOA_SHARED_CONTROL_HPP_
