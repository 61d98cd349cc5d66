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

#include "loa/session.hpp"

#include <algorithm>
#include <cmath>

namespace loa {

void SharedControlConfig::validate() const {
  if (blending.alpha < 0.0 || blending.alpha > 1.0) throw Error("blending alpha must lie in [0, 1]");
  safety.validate();
  if (!(stop_horizon > 0.0)) throw Error("stop_horizon must be > 0");
  if (!(lookahead > 0.0)) throw Error("lookahead must be > 0");
}

// ---------------------------------------------------------------------------
// DistractionTask

DistractionTask::DistractionTask(DistractionConfig cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed), needles_(static_cast<std::size_t>(std::max(cfg.gauges, 1)), 0.5) {}

void DistractionTask::tick(double t, double dt) {
  if (!cfg_.enabled) return;
  for (std::size_t i = 0; i < needles_.size(); ++i) {
    const double jitter = 0.05 * rng_.normal();
    if (pending_ && static_cast<std::size_t>(*pending_) == i) {
      // malfunctioning needle drifts out of the normal band
      needles_[i] = std::clamp(needles_[i] + 0.04 + 0.01 * jitter, 0.0, 1.0);
    } else {
      needles_[i] = std::clamp(needles_[i] + 0.2 * (0.5 - needles_[i]) + jitter, 0.3, 0.7);
    }
  }
  if (pending_ && t - pending_since_ > cfg_.response_timeout) {
    pending_.reset();
    push(false);
  }
  const double u = rng_.uniform();
  const auto which = static_cast<int>(rng_.below(needles_.size()));
  if (!pending_ && u < cfg_.malfunction_rate / 60.0 * dt) {
    pending_ = which;
    pending_since_ = t;
  }
}

void DistractionTask::respond(int gauge) {
  if (pending_ && *pending_ == gauge) {
    needles_[static_cast<std::size_t>(gauge)] = 0.5;
    pending_.reset();
    push(true);
  } else {
    push(false);
  }
}

void DistractionTask::record_outcome(bool correct) { push(correct); }

void DistractionTask::push(bool correct) {
  outcomes_.push_back(correct);
  while (static_cast<int>(outcomes_.size()) > cfg_.window) outcomes_.pop_front();
}

double DistractionTask::accuracy() const {
  if (outcomes_.empty()) return 1.0;
  const auto hits = std::count(outcomes_.begin(), outcomes_.end(), true);
  return static_cast<double>(hits) / static_cast<double>(outcomes_.size());
}

bool DistractionTask::paused() const { return !outcomes_.empty() && accuracy() < cfg_.threshold; }

// ---------------------------------------------------------------------------
// TickInput JSON

Json tick_input_to_json(const TickInput& in) {
  Json j = {{"j_x", in.j_x}, {"j_y", in.j_y}};
  j["shift_request"] = in.shift_request ? Json(to_string(*in.shift_request)) : Json(nullptr);
  j["distraction_responses"] = in.distraction_responses;
  return j;
}

TickInput tick_input_from_json(const Json& j) {
  TickInput in;
  in.j_x = j.at("j_x").get<double>();
  in.j_y = j.at("j_y").get<double>();
  if (auto it = j.find("shift_request"); it != j.end() && !it->is_null()) {
    in.shift_request = parse_direction(it->get<std::string>());
  }
  if (auto it = j.find("distraction_responses"); it != j.end()) {
    in.distraction_responses = it->get<std::vector<int>>();
  }
  return in;
}

// ---------------------------------------------------------------------------
// Session

Session::Session(SimConfig sim, SharedControlConfig control, CourseMap map, std::string operator_id,
                 LoaLevel initial_level, DistractionConfig distraction, std::uint64_t seed)
    : sim_(sim),
      control_(control),
      map_(std::move(map)),
      operator_id_(std::move(operator_id)),
      distraction_(distraction, derive_seed(seed, "distraction")),
      noise_rng_(derive_seed(seed, "lidar")),
      tracker_(control.lookahead),
      pose_(map_.start) {
  control_.validate();
  state_.level = initial_level;
}

const Observation& Session::observe() {
  if (obs_) return *obs_;
  Observation o;
  o.tick = tick_;
  o.t = static_cast<double>(tick_) * sim_.dt;
  o.pose = pose_;
  o.target = tracker_.target(map_.waypoints, pose_);
  o.scan = raycast_scan(map_, pose_, sim_.beams, sim_.max_range, o.t);
  if (sim_.range_noise_std > 0.0) {
    for (auto& r : o.scan.ranges) {
      r = std::clamp(r + sim_.range_noise_std * noise_rng_.normal(), 1e-6, sim_.max_range);
    }
  }
  o.d_min = nearest_obstacle_distance(o.scan);
  o.u_r = plan_autonomy_command(pose_, o.scan, o.target.position(), sim_.limits, control_.planner);
  o.loa = state_.level;
  o.paused = distraction_.paused();
  obs_ = std::move(o);
  return *obs_;
}

TickRecord Session::advance(const TickInput& input) {
  const Observation& o = observe();
  const double t = o.t;

  for (int g : input.distraction_responses) distraction_.respond(g);
  distraction_.tick(t, sim_.dt);
  const bool paused = distraction_.paused();

  TickRecord rec;
  rec.t = t;
  rec.j_x = std::clamp(input.j_x, -1.0, 1.0);
  rec.j_y = std::clamp(input.j_y, -1.0, 1.0);
  rec.u_h = joystick_to_velocity({t, rec.j_x, rec.j_y}, sim_.limits, sim_.deadzone);
  rec.u_r = o.u_r;
  rec.loa = state_.level;
  rec.d_min = o.d_min;
  rec.course_id = map_.id;
  rec.operator_id = operator_id_;

  LoaContext ctx;
  ctx.map = &map_;
  ctx.pose = pose_;
  ctx.t = t;
  ctx.chair_radius = sim_.chair_radius;
  ctx.stop_horizon = control_.stop_horizon;
  ctx.dt = sim_.dt;
  ctx.blending = control_.blending;
  rec.u_c = paused ? VelocityCommand{} : apply_loa(state_.level, rec.u_h, rec.u_r, ctx);

  auto [monitor_state, autonomy_req] = safety_shift_monitor(state_, o.d_min, sim_.dt, control_.safety);
  state_ = monitor_state;
  const auto arb = arbitrate_and_shift(state_.level, input.shift_request, autonomy_req, t);
  state_.level = arb.level;
  rec.shift = arb.event;

  std::string alert;
  if (rec.shift) alert = "shift";
  if (paused && !was_paused_) alert += alert.empty() ? "pause" : ",pause";
  if (!alert.empty()) rec.alert = alert;
  was_paused_ = paused;

  const Pose next = step_unicycle(pose_, rec.u_c.v, rec.u_c.omega, sim_.dt);
  bool bumped = false;
  pose_ = resolve_static_motion(map_, pose_, next, sim_.chair_radius, &bumped);
  if (bumped) ++bumps_;
  if (collides_dynamic(map_, pose_, sim_.chair_radius, t + sim_.dt)) failed_ = true;

  ++tick_;
  obs_.reset();
  log_.push_back(rec);
  inputs_.push_back(input);
  return rec;
}

// ---------------------------------------------------------------------------
// Episode drivers

Json profile_to_json(const OperatorProfile& p) {
  return Json{{"name", p.name},
              {"skill", p.skill},
              {"distraction_rate", p.distraction_rate},
              {"noise_amplitude", p.noise_amplitude},
              {"shift_up_threshold", p.shift_up_threshold},
              {"shift_down_threshold", p.shift_down_threshold},
              {"seed", p.seed},
              {"cruise", p.cruise},
              {"steering_gain", p.steering_gain},
              {"distraction_duration", p.distraction_duration},
              {"proximity_gain", p.proximity_gain},
              {"disagreement_gain", p.disagreement_gain},
              {"distraction_gain", p.distraction_gain},
              {"distress_time_constant", p.distress_time_constant},
              {"request_cooldown", p.request_cooldown}};
}

OperatorProfile profile_from_json(const Json& j) {
  OperatorProfile p;
  p.name = j.value("name", p.name);
  p.skill = j.value("skill", p.skill);
  p.distraction_rate = j.value("distraction_rate", p.distraction_rate);
  p.noise_amplitude = j.value("noise_amplitude", p.noise_amplitude);
  p.shift_up_threshold = j.value("shift_up_threshold", p.shift_up_threshold);
  p.shift_down_threshold = j.value("shift_down_threshold", p.shift_down_threshold);
  p.seed = j.value("seed", p.seed);
  p.cruise = j.value("cruise", p.cruise);
  p.steering_gain = j.value("steering_gain", p.steering_gain);
  p.distraction_duration = j.value("distraction_duration", p.distraction_duration);
  p.proximity_gain = j.value("proximity_gain", p.proximity_gain);
  p.disagreement_gain = j.value("disagreement_gain", p.disagreement_gain);
  p.distraction_gain = j.value("distraction_gain", p.distraction_gain);
  p.distress_time_constant = j.value("distress_time_constant", p.distress_time_constant);
  p.request_cooldown = j.value("request_cooldown", p.request_cooldown);
  p.validate();
  return p;
}

EpisodeResult run_scripted_episode(const EpisodeSpec& spec) {
  OperatorProfile profile = spec.profile;
  profile.seed = derive_seed(spec.seed, "operator:" + profile.name);
  ScriptedOperator op(profile);
  Session session(spec.sim, spec.control, generate_course(spec.course_id), spec.profile.name,
                  spec.initial_level, DistractionConfig{}, spec.seed);

  const auto n_ticks = static_cast<std::int64_t>(std::llround(spec.duration / spec.sim.dt));
  VelocityCommand last_u_h;
  while (!session.failed() && session.tick_index() < n_ticks) {
    const Observation& o = session.observe();
    OperatorObservation oo;
    oo.t = o.t;
    oo.dt = spec.sim.dt;
    oo.pose = o.pose;
    oo.target = o.target;
    oo.loa = o.loa;
    oo.d_min = o.d_min;
    oo.u_r = o.u_r;
    oo.last_u_h = last_u_h;
    const auto action = op.step(oo);
    TickInput in;
    in.j_x = action.joystick.j_x;
    in.j_y = action.joystick.j_y;
    in.shift_request = action.request;
    last_u_h = session.advance(in).u_h;
  }

  EpisodeResult result;
  result.log.header.config_hash = spec.config_hash;
  result.log.header.seed = spec.seed;
  result.log.header.course_id = spec.course_id;
  result.log.header.operator_id = spec.profile.name;
  result.log.header.profile = profile_to_json(spec.profile);
  result.log.ticks = session.log();
  result.failed = session.failed();
  result.bumps = session.bumps();
  result.laps = session.laps();
  result.shifts = static_cast<int>(std::count_if(result.log.ticks.begin(), result.log.ticks.end(),
                                                 [](const TickRecord& r) { return r.shift.has_value(); }));
  return result;
}

std::vector<TickRecord> replay_inputs(const SimConfig& sim, const SharedControlConfig& control,
                                      int course_id, const std::string& operator_id,
                                      LoaLevel initial_level, const DistractionConfig& distraction,
                                      std::uint64_t seed, const std::vector<TickInput>& inputs) {
  Session session(sim, control, generate_course(course_id), operator_id, initial_level, distraction, seed);
  for (const auto& in : inputs) {
    if (session.failed()) break;
    session.advance(in);
  }
  return session.log();
}

}  // namespace loa
