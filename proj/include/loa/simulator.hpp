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

#ifndef LOA_SIMULATOR_HPP_
#define LOA_SIMULATOR_HPP_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "loa/geometry.hpp"
#include "loa/types.hpp"

namespace loa {

struct SimConfig {
  double dt = kDefaultTickDt;
  VelocityLimits limits;
  double deadzone = kDefaultDeadzone;
  double chair_radius = 0.45;
  int beams = 180;
  double max_range = 10.0;
  double range_noise_std = 0.0;  // optional Gaussian jitter, off by default
};

// Disc moving back and forth along a straight path [start, end] at constant
// speed. One period covers start -> end -> start.
struct DynamicObstacle {
  Vec2d start = Vec2d::Zero();
  Vec2d end = Vec2d::Zero();
  double radius = 0.3;
  double speed = 0.4;

  double period() const { return 2.0 * (end - start).norm() / speed; }
};

enum class CourseElement { Doorway, RampCorridor, NarrowStraight, TightTurn, DynamicObstacle };

std::string_view to_string(CourseElement e);

struct CourseMap {
  int id = 0;
  std::vector<Segment> static_segments;
  std::optional<DynamicObstacle> dynamic_obstacle;
  Pose start;
  Pose goal;
  std::vector<Pose> waypoints;  // closed circuit, first entry near start
  std::array<CourseElement, 5> element_order{};
};

// Fixed fixture course 1..6; each is a closed loop containing all five
// navigation elements in an id-specific order. Throws loa::Error otherwise.
CourseMap generate_course(int id);

struct LidarScan {
  double t = 0.0;
  std::vector<double> ranges;
  double angle_min = 0.0;  // relative to the chair heading
  double angle_max = 0.0;
  double max_range = 0.0;

  double angle_increment() const {
    return ranges.size() > 1 ? (angle_max - angle_min) / static_cast<double>(ranges.size() - 1)
                             : 0.0;
  }
  double angle(std::size_t i) const { return angle_min + angle_increment() * static_cast<double>(i); }
};

Vec2d step_dynamic_obstacle(const DynamicObstacle& obstacle, double t);
std::optional<Vec2d> dynamic_obstacle_position(const CourseMap& map, double t);

// Evenly spaced beams over the full circle starting at -pi relative to the
// heading. Ranges lie in (0, max_range]; beams without a hit read max_range.
LidarScan raycast_scan(const CourseMap& map, const Pose& pose, int beams, double max_range,
                       double t = 0.0);

double nearest_obstacle_distance(const LidarScan& scan);

// Chair disc against static walls and, at time t, the dynamic obstacle.
bool collision_check(const CourseMap& map, const Pose& pose, double chair_radius, double t = 0.0);
bool collides_static(const CourseMap& map, const Pose& pose, double chair_radius);
bool collides_dynamic(const CourseMap& map, const Pose& pose, double chair_radius, double t);

// Moves the chair from `from` to `to` against the static walls. A blocked
// step slides along the nearest wall when that is collision-free, otherwise
// only the heading changes. `bumped` reports whether the walls interfered.
Pose resolve_static_motion(const CourseMap& map, const Pose& from, const Pose& to, double chair_radius,
                           bool* bumped = nullptr);

// Smallest distance from a point to any static wall.
double static_clearance(const CourseMap& map, const Vec2d& p);

// Lookahead point selection along a closed waypoint circuit.
class WaypointTracker {
 public:
  explicit WaypointTracker(double lookahead = 1.2) : lookahead_(lookahead) {}

  const Pose& target(const std::vector<Pose>& waypoints, const Pose& pose);
  std::size_t index() const { return index_; }
  int laps() const { return laps_; }

 private:
  double lookahead_;
  std::size_t index_ = 0;
  int laps_ = 0;
};

}  // namespace loa

#endif  // LOA_SIMULATOR_HPP_
