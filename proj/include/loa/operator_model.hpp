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

#ifndef LOA_OPERATOR_MODEL_HPP_
#define LOA_OPERATOR_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "loa/geometry.hpp"
#include "loa/types.hpp"
#include "loa/util.hpp"

namespace loa {

// Synthetic operator used to generate ground-truth data without human
// participants. Distress is a first-order low-pass of
//   proximity_gain * proximity + disagreement_gain * |u_h - u_r|
//     + distraction_gain * distracted
// and drives shift requests through the two thresholds.
struct OperatorProfile {
  std::string name = "default";
  double skill = 0.7;              // [0, 1]; 1 removes steering noise
  double distraction_rate = 2.0;   // bursts per minute
  double noise_amplitude = 0.5;
  double shift_up_threshold = 0.7;
  double shift_down_threshold = 0.15;
  std::uint64_t seed = 1;

  double cruise = 0.6;                // forward deflection on clear path
  double steering_gain = 1.5;         // joystick per radian of heading error
  double distraction_duration = 3.0;  // mean burst length, s
  double proximity_gain = 0.3;
  double disagreement_gain = 0.6;
  double distraction_gain = 0.3;
  double distress_time_constant = 1.5;  // s
  double request_cooldown = 20.0;       // s between own requests

  void validate() const;
};

// What the operator perceives on a tick.
struct OperatorObservation {
  double t = 0.0;
  double dt = kDefaultTickDt;
  Pose pose;
  Pose target;  // lookahead point on the course
  LoaLevel loa = LoaLevel::A0;
  double d_min = 0.0;
  VelocityCommand u_r;
  VelocityCommand last_u_h;
};

struct OperatorAction {
  JoystickSample joystick;
  std::optional<ShiftDirection> request;
};

class ScriptedOperator {
 public:
  explicit ScriptedOperator(OperatorProfile profile);

  OperatorAction step(const OperatorObservation& obs);

  double distress() const { return distress_; }
  bool distracted() const { return distracted_; }
  const OperatorProfile& profile() const { return profile_; }

  // Test hook: overrides the internal distress state.
  void force_distress(double value) { distress_ = value; }

 private:
  OperatorProfile profile_;
  Rng rng_;
  double distress_ = 0.0;
  double lateral_drift_ = 0.0;  // Ornstein-Uhlenbeck steering noise
  bool distracted_ = false;
  double distraction_until_ = 0.0;
  double distraction_offset_ = 0.0;
  double cooldown_until_ = 0.0;
};

}  // namespace loa

#endif  // LOA_OPERATOR_MODEL_HPP_
