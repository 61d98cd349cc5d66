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

// Slow reference implementations shared by the unit tests and the
// acceptance runner. None of these reuse library code paths beyond the
// plain data types.

#ifndef LOA_TESTS_ORACLES_HPP_
#define LOA_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "loa/features.hpp"
#include "loa/frechet.hpp"
#include "loa/geometry.hpp"
#include "loa/simulator.hpp"
#include "loa/util.hpp"

namespace loa::oracle {

// Minimum over every monotone coupling of the maximum pair distance.
template <class Scalar>
Scalar frechet_by_enumeration(const Polyline<Scalar>& a, const Polyline<Scalar>& b) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  std::vector<std::pair<std::size_t, std::size_t>> path;
  auto walk = [&](auto&& self, std::size_t i, std::size_t j, Scalar worst) -> void {
    worst = std::max(worst, Scalar((a[i] - b[j]).norm()));
    if (worst >= best) return;
    if (i + 1 == a.size() && j + 1 == b.size()) {
      best = worst;
      return;
    }
    if (i + 1 < a.size()) self(self, i + 1, j, worst);
    if (j + 1 < b.size()) self(self, i, j + 1, worst);
    if (i + 1 < a.size() && j + 1 < b.size()) self(self, i + 1, j + 1, worst);
  };
  walk(walk, 0, 0, Scalar(0));
  return best;
}

template <class Scalar>
Polyline<Scalar> random_polyline(Rng& rng, std::size_t n, double extent = 10.0) {
  Polyline<Scalar> p(n);
  for (auto& v : p) v = Vec2<Scalar>(Scalar(rng.uniform(-extent, extent)), Scalar(rng.uniform(-extent, extent)));
  return p;
}

// |V(w)| / |V(0)| evaluated directly from the samples.
inline double dtft_magnitude(const std::vector<double>& v, double dt, double w) {
  std::complex<double> acc = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) acc += v[n] * std::polar(1.0, -w * dt * static_cast<double>(n));
  return std::abs(acc);
}

// d|V(w)|/dw from the analytic derivative of the transform.
inline double dtft_magnitude_slope(const std::vector<double>& v, double dt, double w) {
  std::complex<double> val = 0.0, der = 0.0;
  for (std::size_t n = 0; n < v.size(); ++n) {
    const double tn = dt * static_cast<double>(n);
    const auto e = std::polar(1.0, -w * tn);
    val += v[n] * e;
    der += v[n] * std::complex<double>(0.0, -tn) * e;
  }
  const double m = std::abs(val);
  return m > 0.0 ? (std::conj(val) * der).real() / m : 0.0;
}

// Spectral arc length as the integral of sqrt((1 / wc)^2 + |V'|^2) on a
// dense panel grid with adaptive Simpson refinement. The cutoff is located
// by bisection on the exact spectrum.
inline std::optional<double> sparc_dense(const std::vector<double>& v, double dt, const FeatureConfig& cfg,
                                         int panels = 4000) {
  double v0 = 0.0;
  for (double x : v) v0 += x;
  v0 = std::abs(v0);
  if (!(v0 > 0.0)) return std::nullopt;
  auto mag = [&](double w) { return dtft_magnitude(v, dt, w) / v0; };

  const double nyquist = std::numbers::pi / dt;
  const double coarse = nyquist / 8192.0;
  double last = 0.0;
  for (int k = 0; k <= 8192; ++k) {
    const double w = coarse * k;
    if (mag(w) >= cfg.amplitude_threshold) last = w;
  }
  double w_star = last;
  if (last + coarse <= nyquist) {
    double lo = last, hi = last + coarse;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (mag(mid) >= cfg.amplitude_threshold ? lo : hi) = mid;
    }
    w_star = lo;
  }
  const double wc = std::min(cfg.cutoff_max, w_star);
  if (!(wc > 0.0)) return std::nullopt;

  auto g = [&](double w) { return std::hypot(1.0 / wc, dtft_magnitude_slope(v, dt, w) / v0); };
  auto simpson = [&](auto&& self, double a, double b, double fa, double fm, double fb, double whole,
                     int depth) -> double {
    const double m = 0.5 * (a + b);
    const double flm = g(0.5 * (a + m)), frm = g(0.5 * (m + b));
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth >= 40 || std::abs(left + right - whole) <= 1e-12) return left + right + (left + right - whole) / 15.0;
    return self(self, a, m, fa, flm, fm, left, depth + 1) + self(self, m, b, fm, frm, fb, right, depth + 1);
  };
  double length = 0.0;
  const double h = wc / panels;
  for (int k = 0; k < panels; ++k) {
    const double a = h * k, b = h * (k + 1);
    const double fa = g(a), fm = g(0.5 * (a + b)), fb = g(b);
    length += simpson(simpson, a, b, fa, fm, fb, h / 6.0 * (fa + 4.0 * fm + fb), 0);
  }
  return -length;
}

// Speed profile built from a few low-frequency cosines over a positive
// offset.
inline std::vector<double> band_limited_profile(Rng& rng, std::size_t n, double dt, double max_hz = 2.0) {
  const int terms = 1 + static_cast<int>(rng.below(3));
  std::vector<double> f(terms), a(terms), ph(terms);
  double amp = 0.0;
  for (int k = 0; k < terms; ++k) {
    f[k] = rng.uniform(0.1, max_hz);
    a[k] = rng.uniform(0.05, 0.4);
    ph[k] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    amp += a[k];
  }
  const double offset = amp + rng.uniform(0.05, 0.5);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = dt * static_cast<double>(i);
    double s = offset;
    for (int k = 0; k < terms; ++k) s += a[k] * std::cos(2.0 * std::numbers::pi * f[k] * t + ph[k]);
    v[i] = s;
  }
  return v;
}

// Pose after driving at constant (v, omega) for `duration`, from the
// circle centre and the swept angle.
inline Pose circle_pose(const Pose& p0, double v, double omega, double duration) {
  const double r = v / omega;
  const Vec2d centre(p0.x - r * std::sin(p0.theta), p0.y + r * std::cos(p0.theta));
  const double th = p0.theta + omega * duration;
  return {centre.x() + r * std::sin(th), centre.y() - r * std::cos(th), normalize_angle(th)};
}

inline bool segments_cross(const Vec2d& p, const Vec2d& q, const Segment& s) {
  auto orient = [](const Vec2d& a, const Vec2d& b, const Vec2d& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
  };
  const double d1 = orient(s.a, s.b, p), d2 = orient(s.a, s.b, q);
  const double d3 = orient(p, q, s.a), d4 = orient(p, q, s.b);
  return ((d1 <= 0.0 && d2 >= 0.0) || (d1 >= 0.0 && d2 <= 0.0)) &&
         ((d3 <= 0.0 && d4 >= 0.0) || (d3 >= 0.0 && d4 <= 0.0));
}

// Range along one beam by marching in 1 mm steps, then bisecting the first
// bracketed hit.
inline double ray_march(const CourseMap& map, const Vec2d& origin, const Vec2d& dir, double max_range, double t,
                        double step = 1e-3) {
  const auto disc = dynamic_obstacle_position(map, t);
  const double radius = map.dynamic_obstacle ? map.dynamic_obstacle->radius : 0.0;
  auto blocked = [&](double s) {
    const Vec2d q = origin + s * dir;
    for (const auto& seg : map.static_segments)
      if (segments_cross(origin, q, seg)) return true;
    if (disc) {
      // The disc is convex, so the path meets it iff the closest point does.
      const double u = std::clamp((*disc - origin).dot(dir), 0.0, s);
      if ((origin + u * dir - *disc).norm() <= radius) return true;
    }
    return false;
  };
  double lo = 0.0;
  for (double s = step;; s += step) {
    const double probe = std::min(s, max_range);
    if (blocked(probe)) {
      double hi = probe;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (blocked(mid) ? hi : lo) = mid;
      }
      return hi;
    }
    lo = probe;
    if (probe >= max_range) return max_range;
  }
}

}  // namespace loa::oracle

#endif  // LOA_TESTS_ORACLES_HPP_
