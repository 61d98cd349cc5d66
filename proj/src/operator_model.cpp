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

#include "loa/operator_model.hpp"

#include <algorithm>
#include <cmath>

namespace loa {

namespace {
constexpr double kDriftTimeConstant = 0.8;  // s
constexpr double kChatterShare = 0.25;
constexpr double kProximityOnset = 1.0;  // m
constexpr double kProximitySpan = 0.5;   // m
}  // namespace

void OperatorProfile::validate() const {
  auto require = [&](bool ok, const char* what) {
    if (!ok) throw Error("operator profile '" + name + "': " + what);
  };
  require(skill >= 0.0 && skill <= 1.0, "skill must lie in [0, 1]");
  require(distraction_rate >= 0.0, "distraction_rate must be >= 0");
  require(noise_amplitude >= 0.0, "noise_amplitude must be >= 0");
  require(shift_up_threshold > shift_down_threshold, "shift_up_threshold must exceed shift_down_threshold");
  require(distress_time_constant > 0.0, "distress_time_constant must be > 0");
  require(request_cooldown >= 0.0, "request_cooldown must be >= 0");
  require(distraction_duration > 0.0, "distraction_duration must be > 0");
}

ScriptedOperator::ScriptedOperator(OperatorProfile profile)
    : profile_(std::move(profile)), rng_(profile_.seed) {
  profile_.validate();
}

OperatorAction ScriptedOperator::step(const OperatorObservation& obs) {
  const auto& pr = profile_;
  const double dt = obs.dt;

  const Vec2d to_target = obs.target.position() - obs.pose.position();
  const double err = normalize_angle(std::atan2(to_target.y(), to_target.x()) - obs.pose.theta);
  const double jx_nominal = std::clamp(-pr.steering_gain * err, -1.0, 1.0);
  const double jy_nominal = std::abs(err) > 1.2 ? 0.1 : pr.cruise * std::max(0.15, std::cos(err));

  // Fixed number of draws per tick keeps streams aligned across profiles.
  const double n_drift = rng_.normal();
  const double n_chatter = rng_.normal();
  const double u_onset = rng_.uniform();
  const double u_length = rng_.uniform();
  const double u_offset = rng_.uniform();

  const double noise = (1.0 - pr.skill) * pr.noise_amplitude;
  lateral_drift_ += -lateral_drift_ * dt / kDriftTimeConstant + noise * std::sqrt(dt) * n_drift;
  const double chatter = noise * kChatterShare * n_chatter;

  if (distracted_ && obs.t >= distraction_until_) distracted_ = false;
  if (!distracted_ && u_onset < pr.distraction_rate / 60.0 * dt) {
    distracted_ = true;
    distraction_until_ = obs.t + pr.distraction_duration * (0.5 + u_length);
    distraction_offset_ = 1.4 * u_offset - 0.7;
  }

  double jx, jy;
  if (distracted_) {
    jx = distraction_offset_ + lateral_drift_ + 2.0 * chatter;
    jy = 0.3 * jy_nominal + chatter;
  } else {
    jx = jx_nominal + lateral_drift_ + chatter;
    jy = jy_nominal + 0.5 * chatter;
  }

  OperatorAction action;
  action.joystick = {obs.t, std::clamp(jx, -1.0, 1.0), std::clamp(jy, -1.0, 1.0)};

  const double proximity = std::clamp((kProximityOnset - obs.d_min) / kProximitySpan, 0.0, 1.0);
  const double disagreement = (obs.last_u_h - obs.u_r).vec().norm();
  const double drive = pr.proximity_gain * proximity + pr.disagreement_gain * disagreement +
                       pr.distraction_gain * (distracted_ ? 1.0 : 0.0);
  distress_ += dt / pr.distress_time_constant * (drive - distress_);

  if (obs.t >= cooldown_until_) {
    if (distress_ > pr.shift_up_threshold && obs.loa != LoaLevel::A2) {
      action.request = ShiftDirection::Up;
    } else if (distress_ < pr.shift_down_threshold && obs.loa != LoaLevel::A0) {
      action.request = ShiftDirection::Down;
    }
    if (action.request) cooldown_until_ = obs.t + pr.request_cooldown;
  }
  return action;
}

}  // namespace loa
