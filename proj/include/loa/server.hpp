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

// Live session service. Each WebSocket connection owns one Session; text
// frames carry one newline-terminated JSON object each. See docs/protocol.md.

#ifndef LOA_SERVER_HPP_
#define LOA_SERVER_HPP_

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "loa/config.hpp"
#include "loa/session.hpp"

namespace loa {

enum class ClockMode {
  Realtime,  // ticks at 1 / dt from the first client frame, holding the last joystick sample
  Lockstep,  // every joystick message advances exactly one tick
};

struct ServeOptions {
  unsigned short port = 8765;
  std::string address = "127.0.0.1";
  ClockMode clock = ClockMode::Realtime;
  std::filesystem::path log_dir = "out/sessions";
  int default_course = 1;
  LoaLevel default_level = LoaLevel::A0;
};

struct SessionParams {
  int course_id = 1;
  LoaLevel initial_level = LoaLevel::A0;
  std::string operator_id = "human";
  std::uint64_t seed = 0;
};

// Header line of a served input log, followed by one TickInput per line.
std::string inputs_to_jsonl(const SessionParams& p, const DistractionConfig& d, const std::vector<TickInput>& inputs);
struct InputLog {
  SessionParams params;
  DistractionConfig distraction;
  std::vector<TickInput> inputs;
};
InputLog inputs_from_jsonl(std::string_view text);

// Episode log for a served or replayed session.
EpisodeLog session_episode_log(const RunConfig& cfg, const SessionParams& p, std::vector<TickRecord> ticks);

// Re-runs an input log offline through the shared tick loop.
EpisodeLog replay_input_log(const RunConfig& cfg, const InputLog& log);

// Transport-free protocol handler for one client.
class SessionService {
 public:
  SessionService(const RunConfig& cfg, ServeOptions opts, int session_index);

  // Greeting with course geometry; sent on connect and after a start message.
  std::string hello();
  // Handles one client frame and returns the frames to send back.
  std::vector<std::string> handle(std::string_view frame);
  // Realtime clock: advances one tick with the held joystick sample.
  std::string tick();
  // Writes the session and input logs; safe to call more than once.
  void finalize();

  Session& session();
  const SessionParams& params() const { return params_; }
  std::int64_t ticks() const { return session_ ? session_->tick_index() : 0; }
  std::filesystem::path log_path() const;
  std::filesystem::path inputs_path() const;

 private:
  std::string advance();
  std::string error(const std::string& message) const;
  std::string state_message(const TickRecord& rec);
  void ensure_session();

  const RunConfig& cfg_;
  ServeOptions opts_;
  int index_;
  SessionParams params_;
  std::optional<Session> session_;
  TickInput pending_;
  bool finalized_ = false;
};

// Accept loop on a single I/O thread. `run` blocks until `stop` is called
// or SIGINT/SIGTERM arrives (when `handle_signals` is set).
class Server {
 public:
  Server(const RunConfig& cfg, ServeOptions opts);
  ~Server();

  unsigned short port() const;
  void run(bool handle_signals = false);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace loa

#endif  // LOA_SERVER_HPP_
