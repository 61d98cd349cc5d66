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

// Planar primitives: poses, segments, rays and unicycle kinematics.

#ifndef LOA_GEOMETRY_HPP_
#define LOA_GEOMETRY_HPP_

#include <cmath>
#include <numbers>
#include <optional>

#include <Eigen/Core>

namespace loa {

template <class Scalar>
using Vec2 = Eigen::Matrix<Scalar, 2, 1>;
using Vec2d = Vec2<double>;

// Wraps an angle into (-pi, pi].
template <class Scalar>
Scalar normalize_angle(Scalar a) {
  constexpr Scalar kPi = std::numbers::pi_v<Scalar>;
  Scalar r = std::remainder(a, 2 * kPi);
  if (r <= -kPi) r += 2 * kPi;
  return r;
}

template <class Scalar>
struct PoseT {
  Scalar x = 0;
  Scalar y = 0;
  Scalar theta = 0;

  Vec2<Scalar> position() const { return {x, y}; }
  Vec2<Scalar> heading() const { return {std::cos(theta), std::sin(theta)}; }
  friend bool operator==(const PoseT&, const PoseT&) = default;
};
using Pose = PoseT<double>;

template <class Scalar>
struct SegmentT {
  Vec2<Scalar> a;
  Vec2<Scalar> b;
};
using Segment = SegmentT<double>;

// Below this |omega| the unicycle is integrated as a straight line.
inline constexpr double kStraightOmega = 1e-9;

// Exact-arc integration of unicycle kinematics under a constant command held
// for dt. The heading of the result is wrapped into (-pi, pi].
template <class Scalar>
PoseT<Scalar> step_unicycle(const PoseT<Scalar>& p, Scalar v, Scalar omega, Scalar dt) {
  PoseT<Scalar> out = p;
  if (std::abs(omega) < Scalar(kStraightOmega)) {
    out.x += v * dt * std::cos(p.theta);
    out.y += v * dt * std::sin(p.theta);
    out.theta = normalize_angle(p.theta + omega * dt);
    return out;
  }
  const Scalar r = v / omega;
  const Scalar th1 = p.theta + omega * dt;
  out.x += r * (std::sin(th1) - std::sin(p.theta));
  out.y += r * (std::cos(p.theta) - std::cos(th1));
  out.theta = normalize_angle(th1);
  return out;
}

template <class Scalar>
Scalar point_segment_distance(const Vec2<Scalar>& p, const SegmentT<Scalar>& s) {
  const Vec2<Scalar> ab = s.b - s.a;
  const Scalar len2 = ab.squaredNorm();
  if (len2 == Scalar(0)) return (p - s.a).norm();
  Scalar u = (p - s.a).dot(ab) / len2;
  u = u < Scalar(0) ? Scalar(0) : (u > Scalar(1) ? Scalar(1) : u);
  return (p - (s.a + u * ab)).norm();
}

template <class Scalar>
Scalar cross2(const Vec2<Scalar>& a, const Vec2<Scalar>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

// Distance along a unit-direction ray to its first intersection with a
// segment, or nullopt when the ray misses it.
template <class Scalar>
std::optional<Scalar> ray_segment_hit(const Vec2<Scalar>& origin, const Vec2<Scalar>& dir,
                                      const SegmentT<Scalar>& s) {
  const Vec2<Scalar> e = s.b - s.a;
  const Scalar denom = cross2<Scalar>(dir, e);
  const Vec2<Scalar> w = s.a - origin;
  if (denom == Scalar(0)) return std::nullopt;  // parallel; grazing hits are ignored
  const Scalar t = cross2<Scalar>(w, e) / denom;
  const Scalar u = cross2<Scalar>(w, dir) / denom;
  if (t < Scalar(0) || u < Scalar(0) || u > Scalar(1)) return std::nullopt;
  return t;
}

// First intersection of a unit-direction ray with a circle. A ray starting
// inside the circle hits at distance zero.
template <class Scalar>
std::optional<Scalar> ray_circle_hit(const Vec2<Scalar>& origin, const Vec2<Scalar>& dir,
                                     const Vec2<Scalar>& center, Scalar radius) {
  const Vec2<Scalar> oc = origin - center;
  const Scalar c = oc.squaredNorm() - radius * radius;
  if (c <= Scalar(0)) return Scalar(0);
  const Scalar b = oc.dot(dir);
  const Scalar disc = b * b - c;
  if (b > Scalar(0) || disc < Scalar(0)) return std::nullopt;
  return -b - std::sqrt(disc);
}

}  // namespace loa

#endif  // LOA_GEOMETRY_HPP_
