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

#include "loa/shared_control.hpp"

#include <algorithm>
#include <cmath>

namespace loa {

void SafetyShiftParams::validate() const {
  if (!(delta_low < delta_high)) throw Error("safety shift: delta_low must be < delta_high");
  if (!(tau > 0.0)) throw Error("safety shift: tau must be > 0");
}

VelocityCommand plan_autonomy_command(const Pose& pose, const LidarScan& scan, const Vec2d& goal,
                                      const VelocityLimits& limits, const PlannerParams& params) {
  const Vec2d to_goal = goal - pose.position();
  if (to_goal.norm() < 1e-9) return {};
  const double err = normalize_angle(std::atan2(to_goal.y(), to_goal.x()) - pose.theta);

  double repulsion = 0.0;
  double r_front = scan.max_range;
  for (std::size_t i = 0; i < scan.ranges.size(); ++i) {
    const double r = scan.ranges[i];
    const double a = scan.angle(i);
    if (r < params.influence) {
      const double w = (params.influence - r) / params.influence;
      repulsion += w * w * std::sin(a);
    }
    if (std::abs(a) <= params.front_half_angle) r_front = std::min(r_front, r);
  }

  const double slow = std::clamp(
      (r_front - params.stop_distance) / (params.slow_distance - params.stop_distance), 0.0, 1.0);
  VelocityCommand u;
  u.v = params.cruise * limits.v_max * std::max(0.0, std::cos(err)) * slow;
  u.omega = params.k_pursuit * err - params.k_turn * repulsion;
  return clamp_to_limits(u, limits);
}

VelocityCommand autonomous_stop_filter(const VelocityCommand& u_h, const Pose& pose,
                                       const CourseMap& map, double chair_radius, double t,
                                       double horizon, double step) {
  if (!(horizon > 0.0)) throw Error("stop filter horizon must be > 0");
  if (u_h.v == 0.0 && u_h.omega == 0.0) return u_h;
  const int n = static_cast<int>(std::ceil(horizon / step - 1e-9));
  Pose p = pose;
  for (int k = 1; k <= n; ++k) {
    const double h = std::min(step, horizon - (k - 1) * step);
    p = step_unicycle(p, u_h.v, u_h.omega, h);
    if (collision_check(map, p, chair_radius, t + std::min(horizon, k * step))) return {};
  }
  return u_h;
}

VelocityCommand blend(const BlendingParams& p, const VelocityCommand& u_h, const VelocityCommand& u_r) {
  return VelocityCommand::from((1.0 - p.alpha) * u_r.vec() + p.alpha * u_h.vec());
}

VelocityCommand apply_loa(LoaLevel level, const VelocityCommand& u_h, const VelocityCommand& u_r,
                          const LoaContext& ctx) {
  switch (level) {
    case LoaLevel::A0:
      return u_h;
    case LoaLevel::A1:
      if (ctx.map == nullptr) throw Error("apply_loa(A1) needs a map");
      return autonomous_stop_filter(u_h, ctx.pose, *ctx.map, ctx.chair_radius, ctx.t,
                                    ctx.stop_horizon, ctx.dt);
    case LoaLevel::A2:
      return blend(ctx.blending, u_h, u_r);
  }
  return u_h;
}

std::pair<LoaState, std::optional<ShiftDirection>> safety_shift_monitor(
    LoaState state, double d_min, double dt, const SafetyShiftParams& p) {
  std::optional<ShiftDirection> request;
  if (d_min < p.delta_low) {
    state.below_timer += dt;
    state.above_timer = 0.0;
    if (state.below_timer > p.tau) {
      request = ShiftDirection::Up;
      state.below_timer = 0.0;
    }
  } else if (d_min > p.delta_high) {
    state.above_timer += dt;
    state.below_timer = 0.0;
    if (state.above_timer > p.tau) {
      request = ShiftDirection::Down;
      state.above_timer = 0.0;
    }
  } else {
    state.below_timer = 0.0;
    state.above_timer = 0.0;
  }
  return {state, request};
}

ArbitrationResult arbitrate_and_shift(LoaLevel level, std::optional<ShiftDirection> human_req,
                                      std::optional<ShiftDirection> autonomy_req, double t) {
  std::optional<ShiftDirection> taken;
  ShiftSource source = ShiftSource::Human;
  if (human_req) {
    taken = human_req;
  } else if (autonomy_req) {
    taken = autonomy_req;
    source = ShiftSource::Autonomy;
  }
  if (!taken) return {level, std::nullopt};
  const auto next = shifted(level, *taken);
  if (!next) return {level, std::nullopt};
  return {*next, ShiftEvent{t, *taken, source, level, *next}};
}

}  // namespace loa
