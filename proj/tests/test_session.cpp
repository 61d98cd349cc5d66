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

#include "loa/operator_model.hpp"
#include "loa/session.hpp"
#include "loa/tick_io.hpp"

namespace loa {
namespace {

Session make_session(LoaLevel level, DistractionConfig d = {}, std::uint64_t seed = 5) {
  return Session(SimConfig{}, SharedControlConfig{}, generate_course(1), "tester", level, d, seed);
}

TEST(Joystick, DeadzoneAndMapping) {
  EXPECT_EQ(joystick_to_velocity({0, 0.02, 0.03}, {}), (VelocityCommand{}));
  const auto u = joystick_to_velocity({0, 0.5, -0.25}, {2.0, 1.0});
  EXPECT_DOUBLE_EQ(u.v, -0.5);
  EXPECT_DOUBLE_EQ(u.omega, -0.5);
  EXPECT_EQ(joystick_to_velocity({0, 3.0, 0.0}, {}).omega, -1.0);
}

TEST(Session, ShiftUpAtTopIsIgnored) {
  auto s = make_session(LoaLevel::A2);
  TickInput in;
  in.j_y = 0.3;
  in.shift_request = ShiftDirection::Up;
  const auto rec = s.advance(in);
  EXPECT_EQ(s.level(), LoaLevel::A2);
  EXPECT_FALSE(rec.shift);
  EXPECT_FALSE(rec.alert);
}

TEST(Session, HumanShiftIsLogged) {
  auto s = make_session(LoaLevel::A0);
  TickInput in;
  in.shift_request = ShiftDirection::Up;
  const auto rec = s.advance(in);
  ASSERT_TRUE(rec.shift);
  EXPECT_EQ(rec.shift->source, ShiftSource::Human);
  EXPECT_EQ(rec.loa, LoaLevel::A0);
  EXPECT_EQ(s.level(), LoaLevel::A1);
  EXPECT_EQ(rec.alert, "shift");
}

TEST(Session, LowDistractionAccuracyPauses) {
  DistractionConfig d;
  d.enabled = true;
  d.malfunction_rate = 0.0;
  auto s = make_session(LoaLevel::A0, d);
  // 14 of 20 correct: rolling accuracy 0.70 is below the 0.75 threshold.
  for (int i = 0; i < 14; ++i) s.distraction().record_outcome(true);
  for (int i = 0; i < 6; ++i) s.distraction().record_outcome(false);
  EXPECT_DOUBLE_EQ(s.distraction().accuracy(), 0.70);
  EXPECT_TRUE(s.distraction().paused());
  TickInput in;
  in.j_y = 0.8;
  const auto rec = s.advance(in);
  EXPECT_EQ(rec.u_c, (VelocityCommand{}));
  EXPECT_NE(rec.u_h, (VelocityCommand{}));
  EXPECT_EQ(rec.alert, "pause");
  EXPECT_TRUE(s.observe().paused);
}

TEST(Session, ClickWithoutMalfunctionIsIncorrect) {
  DistractionConfig d;
  d.enabled = true;
  d.malfunction_rate = 0.0;
  DistractionTask task(d, 3);
  EXPECT_FALSE(task.pending());
  task.respond(2);
  EXPECT_DOUBLE_EQ(task.accuracy(), 0.0);
  EXPECT_TRUE(task.paused());
}

TEST(Session, CorrectClickClearsMalfunction) {
  DistractionConfig d;
  d.enabled = true;
  d.malfunction_rate = 6000.0;
  DistractionTask task(d, 3);
  task.tick(0.0, 0.05);
  ASSERT_TRUE(task.pending());
  task.respond(*task.pending());
  EXPECT_FALSE(task.pending());
  EXPECT_DOUBLE_EQ(task.accuracy(), 1.0);
}

TEST(Session, UnansweredMalfunctionTimesOut) {
  DistractionConfig d;
  d.enabled = true;
  d.malfunction_rate = 6000.0;
  DistractionTask task(d, 4);
  task.tick(0.0, 0.05);
  ASSERT_TRUE(task.pending());
  task.tick(d.response_timeout + 0.1, 0.05);
  EXPECT_LT(task.accuracy(), 1.0);
}

TEST(Session, ReplayReproducesLog) {
  EpisodeSpec spec;
  spec.course_id = 3;
  spec.duration = 30.0;
  spec.seed = 99;
  spec.profile.name = "p";
  const auto ep = run_scripted_episode(spec);
  std::vector<TickInput> inputs;
  for (const auto& r : ep.log.ticks) {
    TickInput in;
    in.j_x = r.j_x;
    in.j_y = r.j_y;
    if (r.shift && r.shift->source == ShiftSource::Human) in.shift_request = r.shift->direction;
    inputs.push_back(in);
  }
  const auto replayed = replay_inputs(SimConfig{}, SharedControlConfig{}, 3, "p", LoaLevel::A0, {}, 99, inputs);
  ASSERT_EQ(replayed.size(), ep.log.ticks.size());
  for (std::size_t i = 0; i < replayed.size(); ++i) {
    ASSERT_EQ(tick_to_line(replayed[i]), tick_to_line(ep.log.ticks[i])) << "tick " << i;
  }
}

TEST(Session, ScriptedEpisodesAreDeterministic) {
  EpisodeSpec spec;
  spec.course_id = 5;
  spec.duration = 20.0;
  spec.seed = 7;
  const auto a = run_scripted_episode(spec);
  const auto b = run_scripted_episode(spec);
  EXPECT_EQ(episode_to_jsonl(a.log), episode_to_jsonl(b.log));
  spec.seed = 8;
  EXPECT_NE(episode_to_jsonl(run_scripted_episode(spec).log), episode_to_jsonl(a.log));
}

TEST(Session, ChairMakesProgress) {
  for (int course = 1; course <= 6; ++course) {
    EpisodeSpec spec;
    spec.course_id = course;
    spec.duration = 60.0;
    spec.seed = 11;
    spec.profile.skill = 0.9;
    spec.profile.distraction_rate = 0.0;
    const auto ep = run_scripted_episode(spec);
    EXPECT_LT(ep.bumps, 60) << "course " << course;
  }
}

TEST(TickIo, RoundTrip) {
  TickRecord r;
  r.t = 1.25;
  r.j_x = 0.1;
  r.j_y = -0.3;
  r.u_h = {0.5, 0.25};
  r.u_r = {0.1, 1.0 / 3.0};
  r.u_c = {0.2, -0.7};
  r.loa = LoaLevel::A1;
  r.d_min = 0.8125;
  r.shift = ShiftEvent{1.25, ShiftDirection::Down, ShiftSource::Autonomy, LoaLevel::A1, LoaLevel::A0};
  r.alert = "shift";
  r.course_id = 4;
  r.operator_id = "x";
  EXPECT_EQ(tick_from_line(tick_to_line(r)), r);
  EpisodeLog log;
  log.header.course_id = 4;
  log.header.seed = 12345678901234567ULL;
  log.ticks = {r, r};
  const auto back = episode_from_jsonl(episode_to_jsonl(log));
  EXPECT_EQ(back.header.seed, log.header.seed);
  EXPECT_EQ(back.ticks, log.ticks);
}

TEST(TickIo, MalformedLineThrows) {
  EXPECT_ANY_THROW(tick_from_line("{\"t\": 1"));
  EXPECT_ANY_THROW(tick_from_line("{\"t\": \"x\"}"));
}

TEST(Operator, ProfileValidation) {
  OperatorProfile p;
  p.skill = 1.5;
  EXPECT_THROW(p.validate(), Error);
  p = OperatorProfile{};
  p.shift_down_threshold = 0.9;
  EXPECT_THROW(p.validate(), Error);
}

TEST(Operator, HighDistressRequestsUp) {
  ScriptedOperator op(OperatorProfile{});
  op.force_distress(5.0);
  OperatorObservation o;
  o.d_min = 0.2;
  o.u_r = {0.0, 1.0};
  o.last_u_h = {1.0, -1.0};
  const auto a = op.step(o);
  EXPECT_EQ(a.request, ShiftDirection::Up);
  o.t = 0.05;
  EXPECT_FALSE(op.step(o).request) << "cooldown";
}

}  // namespace
}  // namespace loa
