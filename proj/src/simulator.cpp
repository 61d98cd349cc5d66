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

#include "loa/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace loa {

namespace {
// Reported range for a beam whose origin already touches geometry.
constexpr double kMinRange = 1e-6;
}  // namespace

std::string_view to_string(CourseElement e) {
  switch (e) {
    case CourseElement::Doorway: return "doorway";
    case CourseElement::RampCorridor: return "ramp_corridor";
    case CourseElement::NarrowStraight: return "narrow_straight";
    case CourseElement::TightTurn: return "tight_turn";
    case CourseElement::DynamicObstacle: return "dynamic_obstacle";
  }
  return "?";
}

Vec2d step_dynamic_obstacle(const DynamicObstacle& obstacle, double t) {
  const double period = obstacle.period();
  if (!(period > 0.0)) return obstacle.start;
  double phase = std::fmod(t, period) / period;
  if (phase < 0.0) phase += 1.0;
  const double s = phase < 0.5 ? 2.0 * phase : 2.0 * (1.0 - phase);
  return obstacle.start + s * (obstacle.end - obstacle.start);
}

std::optional<Vec2d> dynamic_obstacle_position(const CourseMap& map, double t) {
  if (!map.dynamic_obstacle) return std::nullopt;
  return step_dynamic_obstacle(*map.dynamic_obstacle, t);
}

LidarScan raycast_scan(const CourseMap& map, const Pose& pose, int beams, double max_range,
                       double t) {
  if (beams < 8) throw Error("raycast_scan needs at least 8 beams");
  LidarScan scan;
  scan.t = t;
  scan.max_range = max_range;
  scan.angle_min = -std::numbers::pi;
  scan.angle_max = std::numbers::pi - 2.0 * std::numbers::pi / beams;
  scan.ranges.resize(static_cast<std::size_t>(beams));

  const Vec2d origin = pose.position();
  const auto disc = dynamic_obstacle_position(map, t);
  for (int i = 0; i < beams; ++i) {
    const double a = pose.theta + scan.angle(static_cast<std::size_t>(i));
    const Vec2d dir(std::cos(a), std::sin(a));
    double best = max_range;
    for (const auto& seg : map.static_segments) {
      if (auto hit = ray_segment_hit<double>(origin, dir, seg); hit && *hit < best) best = *hit;
    }
    if (disc) {
      if (auto hit = ray_circle_hit<double>(origin, dir, *disc, map.dynamic_obstacle->radius);
          hit && *hit < best) {
        best = *hit;
      }
    }
    scan.ranges[static_cast<std::size_t>(i)] = std::max(best, kMinRange);
  }
  return scan;
}

double nearest_obstacle_distance(const LidarScan& scan) {
  if (scan.ranges.empty()) throw Error("nearest_obstacle_distance on empty scan");
  return *std::min_element(scan.ranges.begin(), scan.ranges.end());
}

double static_clearance(const CourseMap& map, const Vec2d& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& seg : map.static_segments) best = std::min(best, point_segment_distance(p, seg));
  return best;
}

bool collides_static(const CourseMap& map, const Pose& pose, double chair_radius) {
  const Vec2d p = pose.position();
  return std::any_of(map.static_segments.begin(), map.static_segments.end(),
                     [&](const Segment& s) { return point_segment_distance(p, s) <= chair_radius; });
}

Pose resolve_static_motion(const CourseMap& map, const Pose& from, const Pose& to, double chair_radius,
                           bool* bumped) {
  if (bumped) *bumped = false;
  if (!collides_static(map, to, chair_radius)) return to;
  if (bumped) *bumped = true;

  const Vec2d p = to.position();
  auto closest_on = [](const Segment& s, const Vec2d& q) -> Vec2d {
    const Vec2d ab = s.b - s.a;
    const double len2 = ab.squaredNorm();
    const double u = len2 > 0.0 ? std::clamp((q - s.a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return s.a + u * ab;
  };
  const Segment* nearest = nullptr;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : map.static_segments) {
    const double d = (p - closest_on(s, p)).norm();
    if (d < best) {
      best = d;
      nearest = &s;
    }
  }
  Pose out = from;
  out.theta = to.theta;
  const Vec2d step = to.position() - from.position();
  const Vec2d away = from.position() - closest_on(*nearest, from.position());
  if (away.norm() > 0.0) {
    const Vec2d n = away.normalized();
    const double into = step.dot(n);
    const Vec2d slid = into < 0.0 ? Vec2d(step - into * n) : step;
    Pose candidate{from.x + slid.x(), from.y + slid.y(), to.theta};
    if (!collides_static(map, candidate, chair_radius)) return candidate;
  }
  return out;
}

bool collides_dynamic(const CourseMap& map, const Pose& pose, double chair_radius, double t) {
  const auto c = dynamic_obstacle_position(map, t);
  if (!c) return false;
  return (pose.position() - *c).norm() <= chair_radius + map.dynamic_obstacle->radius;
}

bool collision_check(const CourseMap& map, const Pose& pose, double chair_radius, double t) {
  return collides_static(map, pose, chair_radius) || collides_dynamic(map, pose, chair_radius, t);
}

const Pose& WaypointTracker::target(const std::vector<Pose>& waypoints, const Pose& pose) {
  if (waypoints.empty()) throw Error("WaypointTracker needs waypoints");
  const Vec2d p = pose.position();
  for (std::size_t guard = 0; guard < waypoints.size(); ++guard) {
    if ((waypoints[index_].position() - p).norm() >= lookahead_) break;
    if (++index_ == waypoints.size()) {
      index_ = 0;
      ++laps_;
    }
  }
  return waypoints[index_];
}

}  // namespace loa
