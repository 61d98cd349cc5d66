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

#include "loa/features.hpp"

#include <algorithm>
#include <cmath>

namespace loa {

void FeatureConfig::validate() const {
  auto positive = [](double x, const char* name) {
    if (!(x > 0.0)) throw Error(std::string("feature config: ") + name + " must be > 0");
  };
  positive(sparc_window, "sparc_window");
  positive(amplitude_threshold, "amplitude_threshold");
  positive(cutoff_max, "cutoff_max");
  positive(freq_n, "freq_n");
  positive(agreement_n, "agreement_n");
  positive(projection_horizon, "projection_horizon");
  positive(projection_dt, "projection_dt");
  positive(d_clamp_low, "d_clamp_low");
  if (!(beta > 0.0 && beta <= 1.0)) throw Error("feature config: beta must lie in (0, 1]");
  if (!(d_clamp_low < d_clamp_high)) throw Error("feature config: d_clamp bounds out of order");
  if (projection_horizon < projection_dt) throw Error("feature config: projection_horizon < projection_dt");
  if (pad_level < 2) throw Error("feature config: pad_level must be >= 2");
}

std::optional<double> mean_event_rate(std::span<const double> event_times, int n) {
  if (event_times.size() < 2 || n <= 0) return std::nullopt;
  const std::size_t intervals = std::min<std::size_t>(static_cast<std::size_t>(n), event_times.size() - 1);
  const std::size_t begin = event_times.size() - intervals;
  double sum = 0.0;
  int used = 0;
  for (std::size_t k = begin; k < event_times.size(); ++k) {
    const double gap = event_times[k] - event_times[k - 1];
    if (gap <= 0.0) continue;
    sum += 1.0 / gap;
    ++used;
  }
  if (used == 0) return std::nullopt;
  return sum / used;
}

double input_frequency(std::span<const double> event_times, double previous, const FeatureConfig& cfg) {
  const auto rate = mean_event_rate(event_times, cfg.freq_n);
  if (!rate) return previous;
  return cfg.beta * *rate + (1.0 - cfg.beta) * previous;
}

Polyline<double> project_trajectory(const Pose& pose, const VelocityCommand& u, double horizon, double dt) {
  if (!(dt > 0.0) || horizon < dt) throw Error("project_trajectory needs horizon >= dt > 0");
  const auto steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));
  Polyline<double> out;
  out.reserve(steps + 1);
  Pose p = pose;
  out.push_back(p.position());
  for (std::size_t k = 0; k < steps; ++k) {
    p = step_unicycle(p, u.v, u.omega, dt);
    out.push_back(p.position());
  }
  return out;
}

namespace {

double frechet_of_projections(const AgreementSample& s, const FeatureConfig& cfg) {
  const auto a = project_trajectory(s.pose, s.u_h, cfg.projection_horizon, cfg.projection_dt);
  const auto b = project_trajectory(s.pose, s.u_r, cfg.projection_horizon, cfg.projection_dt);
  return discrete_frechet(a, b);
}

std::span<const AgreementSample> tail(std::span<const AgreementSample> h, int n) {
  if (h.empty()) throw Error("agreement features need at least one history entry");
  const auto k = std::min<std::size_t>(h.size(), static_cast<std::size_t>(n));
  return h.subspan(h.size() - k);
}

template <class Range>
double mean(const Range& r) {
  double s = 0.0;
  for (double x : r) s += x;
  return r.empty() ? 0.0 : s / static_cast<double>(r.size());
}

}  // namespace

double complex_agreement(std::span<const AgreementSample> history, const FeatureConfig& cfg) {
  double sum = 0.0;
  const auto recent = tail(history, cfg.agreement_n);
  for (const auto& s : recent) sum += frechet_of_projections(s, cfg);
  return sum / static_cast<double>(recent.size());
}

double simple_agreement(std::span<const AgreementSample> history, const FeatureConfig& cfg) {
  double sum = 0.0;
  const auto recent = tail(history, cfg.agreement_n);
  for (const auto& s : recent) sum += (s.u_h - s.u_r).vec().norm();
  return sum / static_cast<double>(recent.size());
}

double clamp_obstacle_distance(double d_raw, const FeatureConfig& cfg) {
  return std::clamp(d_raw, cfg.d_clamp_low, cfg.d_clamp_high);
}

bool InputEventDetector::update(double j_x, double j_y) {
  bool event = false;
  const bool outside = std::hypot(j_x, j_y) >= deadzone_;
  if (have_prev_) {
    const bool was_outside = std::hypot(prev_x_, prev_y_) >= deadzone_;
    event = (outside && !was_outside) || prev_x_ * j_x < 0.0 || prev_y_ * j_y < 0.0;
  }
  have_prev_ = true;
  prev_x_ = j_x;
  prev_y_ = j_y;
  return event;
}

FeatureExtractor::FeatureExtractor(FeatureConfig cfg, double tick_dt)
    : cfg_(cfg),
      dt_(tick_dt),
      window_samples_(static_cast<int>(std::lround(cfg.sparc_window / tick_dt))),
      events_(cfg.deadzone) {
  cfg_.validate();
  if (window_samples_ < 8) throw Error("sparc_window too short for the tick rate");
}

FeatureVector FeatureExtractor::push(const TickRecord& r) {
  FeatureVector f;
  f.t = r.t;
  f.loa = r.loa;

  speed_.push_back(std::hypot(r.j_x, r.j_y));
  if (static_cast<int>(speed_.size()) > window_samples_) speed_.pop_front();
  f.complete = static_cast<int>(speed_.size()) == window_samples_;
  if (f.complete) {
    const std::vector<double> window(speed_.begin(), speed_.end());
    f.smoothness = sparc(window, dt_, cfg_);
  }

  // Rate over events inside the smoothness window; with fewer than two
  // recent events the fresh rate is zero, so the estimate decays when idle.
  if (events_.update(r.j_x, r.j_y)) event_times_.push_back(r.t);
  while (!event_times_.empty() && event_times_.front() <= r.t - cfg_.sparc_window + 1e-9) {
    event_times_.pop_front();
  }
  const std::vector<double> events(event_times_.begin(), event_times_.end());
  frequency_ = events.size() >= 2 ? input_frequency(events, frequency_, cfg_)
                                  : (1.0 - cfg_.beta) * frequency_;
  f.input_frequency = frequency_;

  // Frechet distance is invariant to a rigid motion applied to both
  // projections, so they are taken from the origin.
  const AgreementSample s{r.u_h, r.u_r, Pose{}};
  frechet_.push_back(frechet_of_projections(s, cfg_));
  l2_.push_back((r.u_h - r.u_r).vec().norm());
  if (static_cast<int>(frechet_.size()) > cfg_.agreement_n) frechet_.pop_front();
  if (static_cast<int>(l2_.size()) > cfg_.agreement_n) l2_.pop_front();
  f.complex_agreement = mean(frechet_);
  f.simple_agreement = mean(l2_);

  f.obstacle_distance = clamp_obstacle_distance(r.d_min, cfg_);
  return f;
}

std::vector<FeatureVector> extract_features(std::span<const TickRecord> log, const FeatureConfig& cfg,
                                            double tick_dt) {
  FeatureExtractor ex(cfg, tick_dt);
  std::vector<FeatureVector> out;
  out.reserve(log.size());
  for (const auto& r : log) out.push_back(ex.push(r));
  return out;
}

}  // namespace loa
