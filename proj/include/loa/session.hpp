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

// The per-tick episode loop shared by scripted generation, replay and the
// live session service.

#ifndef LOA_SESSION_HPP_
#define LOA_SESSION_HPP_

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "loa/operator_model.hpp"
#include "loa/shared_control.hpp"
#include "loa/simulator.hpp"
#include "loa/tick_io.hpp"
#include "loa/types.hpp"
#include "loa/util.hpp"

namespace loa {

struct SharedControlConfig {
  BlendingParams blending;
  SafetyShiftParams safety;
  PlannerParams planner;
  double stop_horizon = 1.0;  // s
  double lookahead = 1.2;     // m, course guidance

  void validate() const;
};

// Gauge-monitoring secondary task. The server owns scoring; driving pauses
// while the rolling accuracy over the last `window` outcomes is below
// `threshold`.
struct DistractionConfig {
  bool enabled = false;
  int gauges = 4;
  double malfunction_rate = 6.0;  // per minute while none is pending
  double response_timeout = 8.0;  // s, an unanswered malfunction is a miss
  int window = 20;
  double threshold = 0.75;
};

class DistractionTask {
 public:
  DistractionTask(DistractionConfig cfg, std::uint64_t seed);

  void tick(double t, double dt);
  void respond(int gauge);
  // Test hook: appends a scored outcome directly.
  void record_outcome(bool correct);

  double accuracy() const;
  bool paused() const;
  const std::vector<double>& needles() const { return needles_; }
  std::optional<int> pending() const { return pending_; }
  const DistractionConfig& config() const { return cfg_; }

 private:
  void push(bool correct);

  DistractionConfig cfg_;
  Rng rng_;
  std::vector<double> needles_;
  std::optional<int> pending_;
  double pending_since_ = 0.0;
  std::deque<bool> outcomes_;
};

// Everything the operator (scripted or human) can see before acting.
struct Observation {
  std::int64_t tick = 0;
  double t = 0.0;
  Pose pose;
  Pose target;
  LidarScan scan;
  double d_min = 0.0;
  VelocityCommand u_r;
  LoaLevel loa = LoaLevel::A0;
  bool paused = false;
};

struct TickInput {
  double j_x = 0.0;
  double j_y = 0.0;
  std::optional<ShiftDirection> shift_request;
  std::vector<int> distraction_responses;

  friend bool operator==(const TickInput&, const TickInput&) = default;
};

Json tick_input_to_json(const TickInput& in);
TickInput tick_input_from_json(const Json& j);

class Session {
 public:
  Session(SimConfig sim, SharedControlConfig control, CourseMap map, std::string operator_id,
          LoaLevel initial_level, DistractionConfig distraction = {}, std::uint64_t seed = 0);

  // Observation for the current tick (computed once per tick).
  const Observation& observe();
  // Applies one tick of input and returns the logged record.
  TickRecord advance(const TickInput& input);

  bool failed() const { return failed_; }
  std::int64_t tick_index() const { return tick_; }
  const Pose& pose() const { return pose_; }
  LoaLevel level() const { return state_.level; }
  int bumps() const { return bumps_; }
  int laps() const { return tracker_.laps(); }
  const CourseMap& map() const { return map_; }
  const SimConfig& sim() const { return sim_; }
  const std::vector<TickRecord>& log() const { return log_; }
  const std::vector<TickInput>& inputs() const { return inputs_; }
  DistractionTask& distraction() { return distraction_; }
  const DistractionTask& distraction() const { return distraction_; }

 private:
  SimConfig sim_;
  SharedControlConfig control_;
  CourseMap map_;
  std::string operator_id_;
  DistractionTask distraction_;
  Rng noise_rng_;
  WaypointTracker tracker_;
  LoaState state_;
  Pose pose_;
  std::int64_t tick_ = 0;
  std::optional<Observation> obs_;
  bool failed_ = false;
  bool was_paused_ = false;
  int bumps_ = 0;
  std::vector<TickRecord> log_;
  std::vector<TickInput> inputs_;
};

struct EpisodeSpec {
  SimConfig sim;
  SharedControlConfig control;
  int course_id = 1;
  OperatorProfile profile;
  LoaLevel initial_level = LoaLevel::A0;
  double duration = 60.0;  // s
  std::string config_hash;
  std::uint64_t seed = 0;
};

struct EpisodeResult {
  EpisodeLog log;
  bool failed = false;
  int shifts = 0;
  int bumps = 0;
  int laps = 0;
};

Json profile_to_json(const OperatorProfile& p);
OperatorProfile profile_from_json(const Json& j);

// Runs a scripted operator through one episode.
EpisodeResult run_scripted_episode(const EpisodeSpec& spec);

// Re-runs recorded per-tick inputs through the same loop.
std::vector<TickRecord> replay_inputs(const SimConfig& sim, const SharedControlConfig& control,
                                      int course_id, const std::string& operator_id,
                                      LoaLevel initial_level, const DistractionConfig& distraction,
                                      std::uint64_t seed, const std::vector<TickInput>& inputs);

}  // namespace loa

#endif  // LOA_SESSION_HPP_
