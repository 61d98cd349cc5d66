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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "loa/features.hpp"

namespace loa {

namespace {

constexpr double kArcTolerance = 1e-7;
constexpr int kMaxDepth = 24;
constexpr int kCutoffBisections = 40;

// Normalized magnitude at an arbitrary frequency, straight from the samples.
class Spectrum {
 public:
  Spectrum(std::span<const double> v, double dt, double v0) : v_(v), dt_(dt), v0_(v0) {}

  double operator()(double w) const {
    const double c = std::cos(w * dt_), s = -std::sin(w * dt_);
    double zr = 1.0, zi = 0.0, re = 0.0, im = 0.0;
    for (double x : v_) {
      re += x * zr;
      im += x * zi;
      const double next = zr * c - zi * s;
      zi = zr * s + zi * c;
      zr = next;
    }
    return std::hypot(re, im) / v0_;
  }

 private:
  std::span<const double> v_;
  double dt_;
  double v0_;
};

// Arc length of (w / wc, mag(w)) over [a, b] given the midpoint value,
// halving until the chord agrees with the two half chords.
double arc(const Spectrum& mag, double wc, double a, double b, double fa, double fm, double fb, int depth) {
  const double m = 0.5 * (a + b);
  const double chord = std::hypot((b - a) / wc, fb - fa);
  const double halves = std::hypot((m - a) / wc, fm - fa) + std::hypot((b - m) / wc, fb - fm);
  // Chord error shrinks fourfold per halving on smooth stretches.
  if (depth >= kMaxDepth || halves - chord <= kArcTolerance) return halves + (halves - chord) / 3.0;
  return arc(mag, wc, a, m, fa, mag(0.5 * (a + m)), fm, depth + 1) +
         arc(mag, wc, m, b, fm, mag(0.5 * (m + b)), fb, depth + 1);
}

}  // namespace

std::optional<double> sparc(std::span<const double> speed, double sample_dt, const FeatureConfig& cfg) {
  const std::size_t n = speed.size();
  if (n < 8) throw Error("sparc needs at least 8 samples");
  if (!(sample_dt > 0.0)) throw Error("sparc needs a positive sample spacing");

  // The transform runs at twice the requested padding so that every coarse
  // bin interval comes with its midpoint.
  const int order = static_cast<int>(std::ceil(std::log2(static_cast<double>(n)))) + cfg.pad_level;
  const std::size_t nfft = std::size_t{1} << (order + 1);
  std::vector<double> padded(nfft, 0.0);
  std::copy(speed.begin(), speed.end(), padded.begin());

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);

  const std::size_t fine_bins = nfft / 2 + 1;
  const double v0 = std::abs(spectrum[0]);
  if (!(v0 > 0.0)) return std::nullopt;
  std::vector<double> fine(fine_bins);
  for (std::size_t k = 0; k < fine_bins; ++k) fine[k] = std::abs(spectrum[k]) / v0;
  const Spectrum exact(speed, sample_dt, v0);

  const double h = 2.0 * std::numbers::pi / (static_cast<double>(nfft) * sample_dt);
  const double thr = cfg.amplitude_threshold;

  // Last grid point at or above the threshold; fine[0] == 1 guarantees one
  // exists. The crossing after it is refined on the exact spectrum.
  std::size_t last = fine_bins - 1;
  while (last > 0 && fine[last] < thr) --last;
  double w_star = h * static_cast<double>(last);
  if (last + 1 < fine_bins) {
    double lo = w_star, hi = w_star + h;
    for (int it = 0; it < kCutoffBisections; ++it) {
      const double mid = 0.5 * (lo + hi);
      (exact(mid) >= thr ? lo : hi) = mid;
    }
    w_star = lo;
  }
  const double wc = std::min(cfg.cutoff_max, w_star);
  if (!(wc > 0.0)) return std::nullopt;

  const double dw = 2.0 * h;
  auto k_end = static_cast<std::size_t>(std::floor(wc / dw + 1e-12));
  k_end = std::min(k_end, (fine_bins - 1) / 2);

  double length = 0.0;
  for (std::size_t k = 1; k <= k_end; ++k) {
    length += arc(exact, wc, dw * static_cast<double>(k - 1), dw * static_cast<double>(k), fine[2 * k - 2],
                  fine[2 * k - 1], fine[2 * k], 0);
  }
  const double w_end = dw * static_cast<double>(k_end);
  if (wc > w_end) length += arc(exact, wc, w_end, wc, fine[2 * k_end], exact(0.5 * (w_end + wc)), exact(wc), 0);
  return -length;
}

}  // namespace loa
