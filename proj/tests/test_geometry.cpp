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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "loa/frechet.hpp"
#include "loa/geometry.hpp"
#include "loa/simulator.hpp"
#include "oracles.hpp"

namespace loa {
namespace {

TEST(Frechet, FrozenValues) {
  const Polyline<double> a = {{0, 0}, {1, 0}, {2, 0}};
  const Polyline<double> b = {{0, 1}, {1, 1}, {2, 1}};
  EXPECT_EQ(discrete_frechet(a, b), 1.0);
  const Polyline<double> c = {{0, 0}, {3, 4}};
  const Polyline<double> d = {{0, 0}};
  EXPECT_EQ(discrete_frechet(c, d), 5.0);
  EXPECT_EQ(discrete_frechet(a, a), 0.0);
}

TEST(Frechet, MatchesEnumerationExactly) {
  Rng rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto a = oracle::random_polyline<double>(rng, 1 + rng.below(6));
    const auto b = oracle::random_polyline<double>(rng, 1 + rng.below(6));
    ASSERT_EQ(discrete_frechet(a, b), oracle::frechet_by_enumeration(a, b)) << "trial " << trial;
  }
}

TEST(Frechet, FloatMatchesEnumerationExactly) {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = oracle::random_polyline<float>(rng, 1 + rng.below(6));
    const auto b = oracle::random_polyline<float>(rng, 1 + rng.below(6));
    ASSERT_EQ(discrete_frechet(a, b), oracle::frechet_by_enumeration(a, b));
  }
}

TEST(Frechet, SymmetricAndBoundedByEndpoints) {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = oracle::random_polyline<double>(rng, 1 + rng.below(12));
    const auto b = oracle::random_polyline<double>(rng, 1 + rng.below(12));
    const double f = discrete_frechet(a, b);
    EXPECT_EQ(f, discrete_frechet(b, a));
    EXPECT_GE(f, (a.front() - b.front()).norm());
    EXPECT_GE(f, (a.back() - b.back()).norm());
  }
}

TEST(Frechet, RejectsEmpty) {
  const Polyline<double> a = {{0, 0}};
  EXPECT_THROW(discrete_frechet(a, Polyline<double>{}), Error);
}

TEST(Kinematics, StraightLine) {
  const Pose p = step_unicycle(Pose{1.0, 2.0, std::numbers::pi / 2}, 0.5, 0.0, 2.0);
  EXPECT_NEAR(p.x, 1.0, 1e-15);
  EXPECT_NEAR(p.y, 3.0, 1e-15);
}

TEST(Kinematics, ClosedFormCircle) {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const Pose p0{rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-std::numbers::pi, std::numbers::pi)};
    const double v = rng.uniform(-1, 1);
    double omega = rng.uniform(-1, 1);
    if (std::abs(omega) < 1e-3) omega = 0.5;
    const int steps = 1 + static_cast<int>(rng.below(40));
    const double dt = 0.05;
    Pose p = p0;
    for (int k = 0; k < steps; ++k) p = step_unicycle(p, v, omega, dt);
    const Pose want = oracle::circle_pose(p0, v, omega, dt * steps);
    EXPECT_NEAR(p.x, want.x, 1e-12);
    EXPECT_NEAR(p.y, want.y, 1e-12);
    EXPECT_NEAR(normalize_angle(p.theta - want.theta), 0.0, 1e-12);
  }
}

TEST(Kinematics, NormalizeAngleRange) {
  for (double a : {-10.0, -std::numbers::pi, 0.0, std::numbers::pi, 7.0}) {
    const double r = normalize_angle(a);
    EXPECT_GT(r, -std::numbers::pi);
    EXPECT_LE(r, std::numbers::pi);
    EXPECT_NEAR(std::remainder(r - a, 2 * std::numbers::pi), 0.0, 1e-12);
  }
}

TEST(Raycast, BoxRanges) {
  CourseMap m;
  m.static_segments = {{{-2, -1}, {2, -1}}, {{2, -1}, {2, 1}}, {{2, 1}, {-2, 1}}, {{-2, 1}, {-2, -1}}};
  const auto scan = raycast_scan(m, Pose{0, 0, 0}, 8, 10.0);
  // Beams start at -pi and step by pi/4.
  EXPECT_NEAR(scan.ranges[0], 2.0, 1e-12);
  EXPECT_NEAR(scan.ranges[2], 1.0, 1e-12);
  EXPECT_NEAR(scan.ranges[4], 2.0, 1e-12);
  EXPECT_NEAR(scan.ranges[6], 1.0, 1e-12);
  EXPECT_NEAR(scan.ranges[5], std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(nearest_obstacle_distance(scan), 1.0, 1e-12);
}

TEST(Raycast, EmptyWorldReturnsMaxRange) {
  CourseMap m;
  const auto scan = raycast_scan(m, Pose{}, 16, 7.5);
  for (double r : scan.ranges) EXPECT_EQ(r, 7.5);
}

TEST(Raycast, MatchesRayMarch) {
  Rng rng(12);
  for (int course = 1; course <= 6; ++course) {
    const CourseMap map = generate_course(course);
    for (int trial = 0; trial < 25; ++trial) {
      const Pose& w = map.waypoints[rng.below(map.waypoints.size())];
      const Pose pose{w.x + rng.uniform(-0.2, 0.2), w.y + rng.uniform(-0.2, 0.2), rng.uniform(-3.1, 3.1)};
      const double t = rng.uniform(0, 60);
      if (collision_check(map, pose, 0.3, t)) continue;
      const auto scan = raycast_scan(map, pose, 36, 10.0, t);
      const std::size_t i = rng.below(scan.ranges.size());
      const double a = pose.theta + scan.angle(i);
      const double want = oracle::ray_march(map, pose.position(), {std::cos(a), std::sin(a)}, 10.0, t);
      EXPECT_NEAR(scan.ranges[i], want, 1e-6) << "course " << course << " beam " << i;
    }
  }
}

TEST(Course, DeterministicAndClosed) {
  for (int id = 1; id <= 6; ++id) {
    const auto a = generate_course(id);
    const auto b = generate_course(id);
    ASSERT_EQ(a.static_segments.size(), b.static_segments.size());
    EXPECT_EQ(a.start, b.start);
    EXPECT_FALSE(a.waypoints.empty());
    EXPECT_TRUE(a.dynamic_obstacle.has_value());
    EXPECT_FALSE(collides_static(a, a.start, 0.45)) << "course " << id;
  }
  EXPECT_THROW(generate_course(0), Error);
  EXPECT_THROW(generate_course(7), Error);
}

TEST(Course, WaypointsKeepClearance) {
  for (int id = 1; id <= 6; ++id) {
    const auto m = generate_course(id);
    for (const auto& w : m.waypoints) EXPECT_GT(static_clearance(m, w.position()), 0.45) << "course " << id;
  }
}

TEST(Collision, SlidingKeepsClearance) {
  CourseMap m;
  m.static_segments = {{{-5, 1}, {5, 1}}};
  const Pose from{0, 0.5, std::numbers::pi / 4};
  const Pose to{0.2, 0.7, std::numbers::pi / 4};
  bool bumped = false;
  const Pose got = resolve_static_motion(m, from, to, 0.45, &bumped);
  EXPECT_TRUE(bumped);
  EXPECT_NEAR(got.x, 0.2, 1e-12);
  EXPECT_NEAR(got.y, 0.5, 1e-12);
  EXPECT_FALSE(collides_static(m, got, 0.45));
}

}  // namespace
}  // namespace loa
