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

// Hand-engineered features over episode logs: smoothness (SPARC) and input
// frequency of the human stream, complex (projected-trajectory Frechet) and
// simple (command L2) human-autonomy agreement, and clamped obstacle
// distance.

#ifndef LOA_FEATURES_HPP_
#define LOA_FEATURES_HPP_

#include <deque>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "loa/frechet.hpp"
#include "loa/geometry.hpp"
#include "loa/types.hpp"

namespace loa {

struct FeatureConfig {
  double sparc_window = 2.0;                          // s
  double amplitude_threshold = 0.05;                  // normalized spectrum
  double cutoff_max = 20.0 * std::numbers::pi;        // rad/s
  int pad_level = 4;                                  // fft length 2^(ceil(log2 n) + pad_level)
  int freq_n = 10;
  double beta = 0.3;
  int agreement_n = 10;
  double projection_horizon = 2.0;  // s
  double projection_dt = 0.1;       // s
  double d_clamp_low = 0.5;         // m
  double d_clamp_high = 3.0;        // m
  double deadzone = kDefaultDeadzone;

  void validate() const;
};

struct FeatureVector {
  double t = 0.0;
  LoaLevel loa = LoaLevel::A0;
  std::optional<double> smoothness;  // H_S, missing on all-idle windows
  double input_frequency = 0.0;      // H_Omega, Hz
  double complex_agreement = 0.0;    // I_C, m
  double simple_agreement = 0.0;     // I_S
  double obstacle_distance = 0.0;    // E_d, m
  bool complete = false;             // false during warm-up

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

// Spectral arc length of a uniformly sampled speed profile.
//
// The magnitude spectrum V is taken from a zero-padded FFT and normalized by
// V(0). The cutoff is the frequency past which the normalized spectrum stays
// below `amplitude_threshold`, located by linear interpolation between bins
// and capped at `cutoff_max`. The result is minus the arc length of the
// normalized spectrum over [0, cutoff] with the frequency axis scaled by
// 1 / cutoff, integrated piecewise linearly. Returns nullopt when V(0) = 0.
std::optional<double> sparc(std::span<const double> speed, double sample_dt, const FeatureConfig& cfg);

// Mean of 1 / (t_k - t_{k-1}) over the last `freq_n` intervals of
// `event_times`, blended into `previous` with weight beta. Zero-length
// intervals are skipped. Fewer than two events (or no usable interval)
// returns `previous` unchanged.
double input_frequency(std::span<const double> event_times, double previous, const FeatureConfig& cfg);

// Mean inter-event rate without smoothing, nullopt if no usable interval.
std::optional<double> mean_event_rate(std::span<const double> event_times, int n);

// ceil(horizon / dt) + 1 poses from repeated unicycle steps under u.
Polyline<double> project_trajectory(const Pose& pose, const VelocityCommand& u, double horizon, double dt);

struct AgreementSample {
  VelocityCommand u_h;
  VelocityCommand u_r;
  Pose pose;
};

double complex_agreement(std::span<const AgreementSample> history, const FeatureConfig& cfg);
double simple_agreement(std::span<const AgreementSample> history, const FeatureConfig& cfg);

double clamp_obstacle_distance(double d_raw, const FeatureConfig& cfg);

// Input events on a joystick stream: leaving the deadzone, or a sign flip on
// either axis between consecutive samples.
class InputEventDetector {
 public:
  explicit InputEventDetector(double deadzone) : deadzone_(deadzone) {}
  bool update(double j_x, double j_y);

 private:
  double deadzone_;
  bool have_prev_ = false;
  double prev_x_ = 0.0;
  double prev_y_ = 0.0;
};

// Streaming per-tick feature computation over one episode.
class FeatureExtractor {
 public:
  FeatureExtractor(FeatureConfig cfg, double tick_dt);

  FeatureVector push(const TickRecord& r);
  // Ticks at the start of an episode whose vectors are flagged incomplete.
  int warmup_ticks() const { return window_samples_ - 1; }

 private:
  FeatureConfig cfg_;
  double dt_;
  int window_samples_;
  InputEventDetector events_;
  std::deque<double> speed_;
  std::deque<double> event_times_;
  double frequency_ = 0.0;
  std::deque<double> frechet_;
  std::deque<double> l2_;
};

std::vector<FeatureVector> extract_features(std::span<const TickRecord> log, const FeatureConfig& cfg,
                                            double tick_dt);

}  // namespace loa

#endif  // LOA_FEATURES_HPP_
