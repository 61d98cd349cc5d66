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

#include <chrono>
#include <cmath>
#include <filesystem>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "loa/server.hpp"
#include "loa/tick_io.hpp"
#include "loa/util.hpp"

namespace loa {
namespace {

namespace fs = std::filesystem;
namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using nlohmann::json;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("loa_test_" + name);
  fs::remove_all(dir);
  return dir;
}

RunConfig serve_config() {
  RunConfig cfg;
  cfg.seed = 17;
  cfg.distraction.enabled = true;
  return cfg;
}

json parse_frame(const std::string& f) {
  EXPECT_FALSE(f.empty());
  EXPECT_EQ(f.back(), '\n');
  EXPECT_EQ(f.find('\n'), f.size() - 1) << "one object per frame";
  return json::parse(f);
}

std::string only(const std::vector<std::string>& frames) {
  EXPECT_EQ(frames.size(), 1u);
  return frames.empty() ? std::string() : frames.front();
}

ServeOptions lockstep_options(const fs::path& dir) {
  ServeOptions o;
  o.port = 0;
  o.clock = ClockMode::Lockstep;
  o.log_dir = dir;
  return o;
}

TEST(Protocol, HelloDescribesSession) {
  const auto cfg = serve_config();
  SessionService svc(cfg, lockstep_options(scratch("hello")), 0);
  const auto h = parse_frame(svc.hello());
  EXPECT_EQ(h.at("type"), "hello");
  EXPECT_EQ(h.at("tick"), 0);
  EXPECT_EQ(h.at("protocol"), 1);
  EXPECT_EQ(h.at("clock"), "lockstep");
  EXPECT_DOUBLE_EQ(h.at("dt").get<double>(), 0.05);
  EXPECT_FALSE(h.at("course").at("walls").empty());
  EXPECT_EQ(h.at("distraction").at("enabled"), true);
}

TEST(Protocol, RejectsMalformedFramesAndContinues) {
  const auto cfg = serve_config();
  const auto dir = scratch("errors");
  SessionService svc(cfg, lockstep_options(dir), 0);
  const char* bad[] = {
      "{not json",
      "[1, 2]",
      "{\"type\": 5}",
      "{\"type\": \"teleport\"}",
      "{\"type\": \"joystick\", \"j_x\": \"a\", \"j_y\": 0}",
      "{\"type\": \"joystick\", \"j_x\": 0}",
      "{\"type\": \"joystick\", \"j_x\": 0, \"j_y\": 1.5}",
      "{\"type\": \"shift_request\", \"direction\": \"sideways\"}",
      "{\"type\": \"shift_request\"}",
      "{\"type\": \"distraction_response\", \"gauge\": 0.5}",
      "{\"type\": \"distraction_response\", \"gauge\": 99}",
      "{\"type\": \"start\", \"course_id\": 9}",
  };
  for (const char* f : bad) {
    const auto e = parse_frame(only(svc.handle(f)));
    EXPECT_EQ(e.at("type"), "error") << f;
    EXPECT_EQ(e.at("tick"), 0) << f;
    EXPECT_FALSE(e.at("message").get<std::string>().empty());
  }
  EXPECT_EQ(svc.ticks(), 0);
  const auto s = parse_frame(only(svc.handle(R"({"type": "joystick", "j_x": 0, "j_y": 0.5})")));
  EXPECT_EQ(s.at("type"), "state");
  EXPECT_EQ(s.at("tick"), 0);
  const auto late = parse_frame(only(svc.handle(R"({"type": "start", "course_id": 2})")));
  EXPECT_EQ(late.at("type"), "error");
  EXPECT_EQ(late.at("tick"), 1);
  svc.finalize();
  EXPECT_EQ(parse_frame(only(svc.handle(R"({"type": "joystick", "j_x": 0, "j_y": 0})"))).at("type"), "error");
  fs::remove_all(dir);
}

TEST(Protocol, StartSelectsCourse) {
  const auto cfg = serve_config();
  SessionService svc(cfg, lockstep_options(scratch("start")), 0);
  const auto h =
      parse_frame(only(svc.handle(R"({"type": "start", "course_id": 5, "initial_loa": "A2", "seed": 8})")));
  EXPECT_EQ(h.at("type"), "hello");
  EXPECT_EQ(h.at("course").at("id"), 5);
  EXPECT_EQ(h.at("session").at("initial_loa"), "A2");
  EXPECT_EQ(svc.session().level(), LoaLevel::A2);
}

TEST(Protocol, ShiftUpAtTopProducesNoAlert) {
  const auto cfg = serve_config();
  SessionService svc(cfg, lockstep_options(scratch("top")), 0);
  svc.handle(R"({"type": "start", "initial_loa": "A2"})");
  EXPECT_TRUE(svc.handle(R"({"type": "shift_request", "direction": "up"})").empty());
  const auto s = parse_frame(only(svc.handle(R"({"type": "joystick", "j_x": 0, "j_y": 0.2})")));
  EXPECT_EQ(s.at("loa"), "A2");
  EXPECT_TRUE(s.at("alerts").empty());
}

TEST(Protocol, PausedStateZeroesCommand) {
  const auto cfg = serve_config();
  SessionService svc(cfg, lockstep_options(scratch("pause")), 0);
  auto& d = svc.session().distraction();
  for (int i = 0; i < 14; ++i) d.record_outcome(true);
  for (int i = 0; i < 6; ++i) d.record_outcome(false);
  const auto s = parse_frame(only(svc.handle(R"({"type": "joystick", "j_x": 0.0, "j_y": 0.9})")));
  EXPECT_EQ(s.at("paused"), true);
  EXPECT_EQ(s.at("u_c").at("v"), 0.0);
  EXPECT_EQ(s.at("u_c").at("omega"), 0.0);
  EXPECT_GT(s.at("u_h").at("v").get<double>(), 0.0);
  bool pause_alert = false;
  for (const auto& a : s.at("alerts")) pause_alert |= a.at("kind") == "pause";
  EXPECT_TRUE(pause_alert);
}

TEST(Protocol, InputLogRoundTrip) {
  SessionParams p;
  p.course_id = 6;
  p.initial_level = LoaLevel::A1;
  p.operator_id = "op";
  p.seed = 1ULL << 60;
  DistractionConfig d;
  d.enabled = true;
  std::vector<TickInput> inputs(3);
  inputs[1].j_x = 0.25;
  inputs[1].shift_request = ShiftDirection::Down;
  inputs[2].distraction_responses = {1, 3};
  const auto back = inputs_from_jsonl(inputs_to_jsonl(p, d, inputs));
  EXPECT_EQ(back.params.seed, p.seed);
  EXPECT_EQ(back.params.initial_level, LoaLevel::A1);
  EXPECT_EQ(back.distraction.enabled, true);
  EXPECT_EQ(inputs_to_jsonl(back.params, back.distraction, back.inputs), inputs_to_jsonl(p, d, inputs));
  EXPECT_THROW(inputs_from_jsonl(""), Error);
}

// Synchronous WebSocket client for the live tests.
class Client {
 public:
  explicit Client(unsigned short port) : ws_(ioc_) {
    ws_.next_layer().connect(tcp::endpoint(net::ip::make_address("127.0.0.1"), port));
    ws_.handshake("127.0.0.1", "/");
    ws_.text(true);
  }
  void send(const json& j) { ws_.write(net::buffer(j.dump() + "\n")); }
  json receive() {
    beast::flat_buffer b;
    ws_.read(b);
    return parse_frame(beast::buffers_to_string(b.data()));
  }
  void close() { ws_.close(websocket::close_code::normal); }

 private:
  net::io_context ioc_;
  websocket::stream<tcp::socket> ws_;
};

class LiveServer {
 public:
  LiveServer(const RunConfig& cfg, ServeOptions opts) : server_(cfg, std::move(opts)) {
    thread_ = std::thread([this] { server_.run(); });
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  unsigned short port() const { return server_.port(); }

 private:
  Server server_;
  std::thread thread_;
};

bool wait_for(const fs::path& p) {
  for (int i = 0; i < 500; ++i) {
    if (fs::exists(p)) return true;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  return false;
}

TEST(Live, LockstepSessionReplaysByteForByte) {
  const auto cfg = serve_config();
  const auto dir = scratch("live_lockstep");
  LiveServer server(cfg, lockstep_options(dir));
  std::vector<TickInput> sent;
  {
    Client c(server.port());
    EXPECT_EQ(c.receive().at("type"), "hello");
    c.send({{"type", "start"}, {"course_id", 3}, {"initial_loa", "A1"}, {"operator_id", "scripted"}, {"seed", 42}});
    EXPECT_EQ(c.receive().at("session").at("seed"), 42);
    Rng rng(5);
    for (int i = 0; i < 600; ++i) {
      TickInput in;
      if (i % 97 == 40) {
        in.shift_request = i % 2 ? ShiftDirection::Up : ShiftDirection::Down;
        c.send({{"type", "shift_request"}, {"direction", to_string(*in.shift_request)}});
      }
      if (i % 31 == 7) {
        const int gauge = static_cast<int>(rng.below(cfg.distraction.gauges));
        in.distraction_responses.push_back(gauge);
        c.send({{"type", "distraction_response"}, {"gauge", gauge}});
      }
      in.j_x = 0.4 * std::sin(0.05 * i);
      in.j_y = 0.3 + 0.5 * std::cos(0.02 * i) + 0.05 * rng.uniform(-1, 1);
      c.send({{"type", "joystick"}, {"j_x", in.j_x}, {"j_y", in.j_y}});
      const auto s = c.receive();
      ASSERT_EQ(s.at("type"), "state");
      ASSERT_EQ(s.at("tick"), i);
      sent.push_back(in);
    }
    c.close();
  }
  const auto log_path = dir / "session_0.jsonl";
  const auto inputs_path = dir / "session_0.inputs.jsonl";
  ASSERT_TRUE(wait_for(log_path));
  ASSERT_TRUE(wait_for(inputs_path));
  const auto served = read_file(log_path);
  const auto recorded = inputs_from_jsonl(read_file(inputs_path));
  ASSERT_EQ(recorded.inputs.size(), sent.size());

  // Offline replay of the recorded inputs.
  EXPECT_EQ(episode_to_jsonl(replay_input_log(cfg, recorded)), served);
  // Offline replay of what the client believes it sent.
  auto ticks = replay_inputs(cfg.sim, cfg.control, 3, "scripted", LoaLevel::A1, cfg.distraction, 42, sent);
  SessionParams p{3, LoaLevel::A1, "scripted", 42};
  EXPECT_EQ(episode_to_jsonl(session_episode_log(cfg, p, std::move(ticks))), served);
  fs::remove_all(dir);
}

TEST(Live, RealtimeStatesAtTwentyHertz) {
  const auto cfg = serve_config();
  const auto dir = scratch("live_realtime");
  auto opts = lockstep_options(dir);
  opts.clock = ClockMode::Realtime;
  LiveServer server(cfg, opts);
  Client c(server.port());
  EXPECT_EQ(c.receive().at("clock"), "realtime");
  c.send({{"type", "joystick"}, {"j_x", 0.0}, {"j_y", 0.4}});
  const auto first = c.receive();
  ASSERT_EQ(first.at("type"), "state");
  EXPECT_EQ(first.at("tick"), 0);
  const auto start = std::chrono::steady_clock::now();
  const int frames = 40;
  for (int i = 1; i <= frames; ++i) {
    const auto s = c.receive();
    ASSERT_EQ(s.at("type"), "state");
    ASSERT_EQ(s.at("tick"), i);
    EXPECT_NEAR(s.at("t").get<double>(), 0.05 * i, 1e-9);
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double hz = frames / elapsed;
  EXPECT_NEAR(hz, 20.0, 2.0);
  c.close();
  ASSERT_TRUE(wait_for(dir / "session_0.jsonl"));
  fs::remove_all(dir);
}

}  // namespace
}  // namespace loa
