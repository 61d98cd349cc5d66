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

// Fixture courses. Each course is a counter-clockwise rectangular loop of
// corridor whose centerline is built turtle-style from straight pieces and
// 90 degree turns. Elements 1-2 sit on the first side, element 3 on the
// second, elements 4-5 on the third; the fourth side returns to the start.
// Filler lengths close the loop. Layout details are in docs/courses.md.

#include <array>
#include <cmath>

#include "loa/simulator.hpp"

namespace loa {
namespace {

using E = CourseElement;

constexpr std::array<std::array<CourseElement, 5>, 6> kElementOrder = {{
    {E::Doorway, E::RampCorridor, E::NarrowStraight, E::TightTurn, E::DynamicObstacle},
    {E::RampCorridor, E::TightTurn, E::DynamicObstacle, E::Doorway, E::NarrowStraight},
    {E::NarrowStraight, E::DynamicObstacle, E::Doorway, E::RampCorridor, E::TightTurn},
    {E::TightTurn, E::Doorway, E::NarrowStraight, E::DynamicObstacle, E::RampCorridor},
    {E::DynamicObstacle, E::NarrowStraight, E::TightTurn, E::RampCorridor, E::Doorway},
    {E::Doorway, E::DynamicObstacle, E::RampCorridor, E::NarrowStraight, E::TightTurn},
}};

constexpr double kOpenHalfWidth = 1.1;
constexpr double kDoorHalfGap = 0.7;
constexpr double kRampHalfWidth = 0.85;
constexpr double kNarrowHalfWidth = 0.75;
constexpr double kTurnHalfWidth = 0.85;
constexpr double kDynamicHalfWidth = 1.8;
constexpr double kDynamicLaneOffset = 1.1;
constexpr double kWaypointSpacing = 0.5;
constexpr double kMinReturnLength = 8.0;

enum class Extra { None, Door, Dynamic };

struct Piece {
  bool turn = false;
  int turn_sign = 0;  // +1 left, -1 right
  double length = 0.0;
  double half_width = kOpenHalfWidth;
  Extra extra = Extra::None;
};

Piece straight(double length, double hw, Extra extra = Extra::None) {
  return {false, 0, length, hw, extra};
}
Piece turn(int sign) { return {true, sign, 0.0, 0.0, Extra::None}; }

void append_element(std::vector<Piece>& out, CourseElement e) {
  switch (e) {
    case E::Doorway: out.push_back(straight(3.0, kOpenHalfWidth, Extra::Door)); break;
    case E::RampCorridor: out.push_back(straight(4.0, kRampHalfWidth)); break;
    case E::NarrowStraight: out.push_back(straight(5.0, kNarrowHalfWidth)); break;
    case E::TightTurn:
      // Chicane bending outward of the loop.
      out.push_back(straight(1.2, kTurnHalfWidth));
      out.push_back(turn(-1));
      out.push_back(straight(1.6, kTurnHalfWidth));
      out.push_back(turn(+1));
      out.push_back(straight(1.2, kTurnHalfWidth));
      break;
    case E::DynamicObstacle: out.push_back(straight(6.0, kDynamicHalfWidth, Extra::Dynamic)); break;
  }
}

Vec2d direction(int heading) {
  static const std::array<Vec2d, 4> dirs = {Vec2d(1, 0), Vec2d(0, 1), Vec2d(-1, 0), Vec2d(0, -1)};
  return dirs[static_cast<std::size_t>(((heading % 4) + 4) % 4)];
}

Vec2d left_normal(const Vec2d& d) { return {-d.y(), d.x()}; }

struct Edge {
  Vec2d start;
  int heading = 0;
  double length = 0.0;
  double half_width = 0.0;
  Extra extra = Extra::None;
};

std::vector<Edge> lay_out(const std::vector<Piece>& pieces) {
  std::vector<Edge> edges;
  Vec2d pos = Vec2d::Zero();
  int heading = 0;
  for (const auto& p : pieces) {
    if (p.turn) {
      heading += p.turn_sign;
      continue;
    }
    edges.push_back({pos, heading, p.length, p.half_width, p.extra});
    pos += p.length * direction(heading);
  }
  return edges;
}

Vec2d displacement(const std::vector<Piece>& pieces) {
  Vec2d pos = Vec2d::Zero();
  int heading = 0;
  for (const auto& p : pieces) {
    if (p.turn) heading += p.turn_sign;
    else pos += p.length * direction(heading);
  }
  return pos;
}

}  // namespace

CourseMap generate_course(int id) {
  if (id < 1 || id > 6) throw Error("unknown course id " + std::to_string(id));
  const auto& order = kElementOrder[static_cast<std::size_t>(id - 1)];

  // Indices of the filler straights, patched after the closure solve.
  std::vector<Piece> pieces;
  pieces.push_back(straight(2.0, kOpenHalfWidth));
  append_element(pieces, order[0]);
  pieces.push_back(straight(1.5, kOpenHalfWidth));
  append_element(pieces, order[1]);
  const std::size_t fill_a = pieces.size();
  pieces.push_back(straight(2.0, kOpenHalfWidth));
  pieces.push_back(turn(+1));
  pieces.push_back(straight(2.0, kOpenHalfWidth));
  append_element(pieces, order[2]);
  const std::size_t fill_b = pieces.size();
  pieces.push_back(straight(2.0, kOpenHalfWidth));
  pieces.push_back(turn(+1));
  pieces.push_back(straight(2.0, kOpenHalfWidth));
  append_element(pieces, order[3]);
  pieces.push_back(straight(1.5, kOpenHalfWidth));
  append_element(pieces, order[4]);
  const std::size_t fill_c = pieces.size();
  pieces.push_back(straight(2.0, kOpenHalfWidth));
  pieces.push_back(turn(+1));
  const std::size_t fill_d = pieces.size();
  pieces.push_back(straight(0.0, kOpenHalfWidth));
  pieces.push_back(turn(+1));

  const Vec2d open = displacement(pieces);
  if (open.x() > 0.0) pieces[fill_c].length += open.x();
  else pieces[fill_a].length -= open.x();
  // Side D runs along -y and must cancel the remaining y offset.
  double return_length = open.y();
  if (return_length < kMinReturnLength) {
    pieces[fill_b].length += kMinReturnLength - return_length;
    return_length = kMinReturnLength;
  }
  pieces[fill_d].length = return_length;

  const auto edges = lay_out(pieces);
  const std::size_t n = edges.size();

  CourseMap map;
  map.id = id;
  map.element_order = order;

  // Wall endpoints at each node: where the previous edge's walls end (in) and
  // where this edge's walls begin (out).
  std::vector<Vec2d> left_in(n), left_out(n), right_in(n), right_out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Edge& prev = edges[(i + n - 1) % n];
    const Edge& cur = edges[i];
    const Vec2d np = left_normal(direction(prev.heading));
    const Vec2d nc = left_normal(direction(cur.heading));
    const Vec2d p = cur.start;
    if (((prev.heading - cur.heading) % 4 + 4) % 4 == 0) {
      left_in[i] = p + prev.half_width * np;
      left_out[i] = p + cur.half_width * nc;
      right_in[i] = p - prev.half_width * np;
      right_out[i] = p - cur.half_width * nc;
      if (prev.half_width != cur.half_width) {
        map.static_segments.push_back({left_in[i], left_out[i]});
        map.static_segments.push_back({right_in[i], right_out[i]});
      }
    } else {
      // 90 degree corner with equal widths: miter points.
      const Vec2d m = cur.half_width * (np + nc);
      left_in[i] = left_out[i] = p + m;
      right_in[i] = right_out[i] = p - m;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    map.static_segments.push_back({left_out[i], left_in[j]});
    map.static_segments.push_back({right_out[i], right_in[j]});

    const Edge& e = edges[i];
    const Vec2d d = direction(e.heading);
    const Vec2d nl = left_normal(d);
    if (e.extra == Extra::Door) {
      const Vec2d mid = e.start + 0.5 * e.length * d;
      map.static_segments.push_back({mid + e.half_width * nl, mid + kDoorHalfGap * nl});
      map.static_segments.push_back({mid - kDoorHalfGap * nl, mid - e.half_width * nl});
    } else if (e.extra == Extra::Dynamic) {
      DynamicObstacle ob;
      ob.start = e.start + 0.5 * d + kDynamicLaneOffset * nl;
      ob.end = e.start + (e.length - 0.5) * d + kDynamicLaneOffset * nl;
      map.dynamic_obstacle = ob;
    }
  }

  map.start = Pose{1.0, 0.0, 0.0};
  map.goal = map.start;

  // Waypoints every kWaypointSpacing along the centerline, starting just
  // ahead of the start pose.
  std::vector<Pose> samples;
  for (const auto& e : edges) {
    const Vec2d d = direction(e.heading);
    const double theta = std::atan2(d.y(), d.x());
    for (double s = 0.0; s < e.length - 1e-9; s += kWaypointSpacing) {
      const Vec2d q = e.start + s * d;
      samples.push_back({q.x(), q.y(), theta});
    }
  }
  std::size_t first = 0;
  while (first < samples.size() && samples[first].y == 0.0 && samples[first].x <= map.start.x) ++first;
  map.waypoints.assign(samples.begin() + static_cast<std::ptrdiff_t>(first), samples.end());
  map.waypoints.insert(map.waypoints.end(), samples.begin(),
                       samples.begin() + static_cast<std::ptrdiff_t>(first));
  return map;
}

}  // namespace loa
