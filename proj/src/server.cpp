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

#include "loa/server.hpp"

#include <chrono>
#include <cmath>
#include <deque>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <spdlog/spdlog.h>

#include "loa/util.hpp"

namespace loa {

namespace fs = std::filesystem;
namespace net = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
using tcp = net::ip::tcp;
using nlohmann::json;

namespace {

json pose_json(const Pose& p) { return {{"x", p.x}, {"y", p.y}, {"theta", p.theta}}; }
json vec_json(const Vec2d& v) { return {{"x", v.x()}, {"y", v.y()}}; }

std::string frame(const json& j) { return j.dump() + "\n"; }

json distraction_json(const DistractionConfig& d) {
  return {{"enabled", d.enabled},
          {"gauges", d.gauges},
          {"malfunction_rate", d.malfunction_rate},
          {"response_timeout", d.response_timeout},
          {"window", d.window},
          {"threshold", d.threshold}};
}

DistractionConfig distraction_from_json(const json& j) {
  DistractionConfig d;
  d.enabled = j.at("enabled").get<bool>();
  d.gauges = j.at("gauges").get<int>();
  d.malfunction_rate = j.at("malfunction_rate").get<double>();
  d.response_timeout = j.at("response_timeout").get<double>();
  d.window = j.at("window").get<int>();
  d.threshold = j.at("threshold").get<double>();
  return d;
}

}  // namespace

std::string inputs_to_jsonl(const SessionParams& p, const DistractionConfig& d, const std::vector<TickInput>& inputs) {
  const json header = {{"header",
                        {{"format", "loa-inputs"},
                         {"version", 1},
                         {"course_id", p.course_id},
                         {"initial_loa", to_string(p.initial_level)},
                         {"operator_id", p.operator_id},
                         {"seed", p.seed},
                         {"distraction", distraction_json(d)}}}};
  std::string out = header.dump() + "\n";
  for (const auto& in : inputs) out += tick_input_to_json(in).dump() + "\n";
  return out;
}

InputLog inputs_from_jsonl(std::string_view text) {
  InputLog log;
  bool header = true;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    const auto j = json::parse(line);
    if (header) {
      const auto& h = j.at("header");
      if (h.at("format") != "loa-inputs" || h.at("version").get<int>() != 1) throw Error("not a version 1 input log");
      log.params.course_id = h.at("course_id").get<int>();
      log.params.initial_level = parse_level(h.at("initial_loa").get<std::string>());
      log.params.operator_id = h.at("operator_id").get<std::string>();
      log.params.seed = h.at("seed").get<std::uint64_t>();
      log.distraction = distraction_from_json(h.at("distraction"));
      header = false;
      continue;
    }
    log.inputs.push_back(tick_input_from_json(j));
  }
  if (header) throw Error("input log has no header");
  return log;
}

EpisodeLog session_episode_log(const RunConfig& cfg, const SessionParams& p, std::vector<TickRecord> ticks) {
  EpisodeLog log;
  log.header.config_hash = cfg.hash();
  log.header.seed = p.seed;
  log.header.course_id = p.course_id;
  log.header.operator_id = p.operator_id;
  log.header.profile = {{"name", p.operator_id}, {"source", "serve"}, {"initial_loa", to_string(p.initial_level)}};
  log.ticks = std::move(ticks);
  return log;
}

EpisodeLog replay_input_log(const RunConfig& cfg, const InputLog& in) {
  auto ticks = replay_inputs(cfg.sim, cfg.control, in.params.course_id, in.params.operator_id, in.params.initial_level,
                             in.distraction, in.params.seed, in.inputs);
  return session_episode_log(cfg, in.params, std::move(ticks));
}

// ---------------------------------------------------------------------------
// SessionService

SessionService::SessionService(const RunConfig& cfg, ServeOptions opts, int session_index)
    : cfg_(cfg), opts_(std::move(opts)), index_(session_index) {
  params_.course_id = opts_.default_course;
  params_.initial_level = opts_.default_level;
  params_.seed = derive_seed(cfg.seed, "session:" + std::to_string(session_index));
}

void SessionService::ensure_session() {
  if (!session_) {
    session_.emplace(cfg_.sim, cfg_.control, generate_course(params_.course_id), params_.operator_id,
                     params_.initial_level, cfg_.distraction, params_.seed);
  }
}

Session& SessionService::session() {
  ensure_session();
  return *session_;
}

std::string SessionService::hello() {
  ensure_session();
  const auto& map = session_->map();
  json walls = json::array();
  for (const auto& s : map.static_segments) walls.push_back({s.a.x(), s.a.y(), s.b.x(), s.b.y()});
  json obstacle = nullptr;
  if (map.dynamic_obstacle) {
    const auto& o = *map.dynamic_obstacle;
    obstacle = {{"start", vec_json(o.start)}, {"end", vec_json(o.end)}, {"radius", o.radius}, {"speed", o.speed}};
  }
  return frame({{"type", "hello"},
                {"tick", session_->tick_index()},
                {"protocol", 1},
                {"dt", cfg_.sim.dt},
                {"clock", opts_.clock == ClockMode::Lockstep ? "lockstep" : "realtime"},
                {"session",
                 {{"course_id", params_.course_id},
                  {"initial_loa", to_string(params_.initial_level)},
                  {"operator_id", params_.operator_id},
                  {"seed", params_.seed}}},
                {"course",
                 {{"id", map.id},
                  {"walls", walls},
                  {"dynamic_obstacle", obstacle},
                  {"start", pose_json(map.start)},
                  {"goal", pose_json(map.goal)}}},
                {"chair_radius", cfg_.sim.chair_radius},
                {"distraction", distraction_json(cfg_.distraction)}});
}

std::string SessionService::error(const std::string& message) const {
  return frame({{"type", "error"}, {"tick", ticks()}, {"message", message}});
}

std::vector<std::string> SessionService::handle(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    return {error("malformed JSON")};
  }
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    return {error("message needs a string 'type'")};
  }
  const auto type = j.at("type").get<std::string>();
  if (finalized_) return {error("session is finalized")};

  if (type == "start") {
    if (ticks() > 0) return {error("start is only accepted before the first tick")};
    SessionParams p = params_;
    try {
      if (j.contains("course_id")) p.course_id = j.at("course_id").get<int>();
      if (j.contains("initial_loa")) p.initial_level = parse_level(j.at("initial_loa").get<std::string>());
      if (j.contains("operator_id")) p.operator_id = j.at("operator_id").get<std::string>();
      if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
      generate_course(p.course_id);
    } catch (const std::exception& e) {
      return {error(std::string("bad start message: ") + e.what())};
    }
    params_ = p;
    session_.reset();
    return {hello()};
  }

  if (type == "joystick") {
    const auto jx = j.find("j_x");
    const auto jy = j.find("j_y");
    if (jx == j.end() || jy == j.end() || !jx->is_number() || !jy->is_number()) {
      return {error("joystick needs numeric j_x and j_y")};
    }
    const double x = jx->get<double>();
    const double y = jy->get<double>();
    if (!std::isfinite(x) || !std::isfinite(y) || std::abs(x) > 1.0 || std::abs(y) > 1.0) {
      return {error("joystick axes must lie in [-1, 1]")};
    }
    pending_.j_x = x;
    pending_.j_y = y;
    if (opts_.clock == ClockMode::Lockstep) return {advance()};
    return {};
  }

  if (type == "shift_request") {
    try {
      pending_.shift_request = parse_direction(j.at("direction").get<std::string>());
    } catch (const std::exception&) {
      return {error("shift_request needs direction 'up' or 'down'")};
    }
    return {};
  }

  if (type == "distraction_response") {
    const auto g = j.find("gauge");
    if (g == j.end() || !g->is_number_integer()) return {error("distraction_response needs an integer gauge")};
    const int gauge = g->get<int>();
    if (gauge < 0 || gauge >= cfg_.distraction.gauges) return {error("gauge index out of range")};
    pending_.distraction_responses.push_back(gauge);
    return {};
  }

  return {error("unknown message type '" + type + "'")};
}

std::string SessionService::tick() {
  if (finalized_) return error("session is finalized");
  return advance();
}

std::string SessionService::advance() {
  ensure_session();
  TickInput input = pending_;
  pending_.shift_request.reset();
  pending_.distraction_responses.clear();
  const TickRecord rec = session_->advance(input);
  return state_message(rec);
}

std::string SessionService::state_message(const TickRecord& rec) {
  Session& s = *session_;
  const auto& obs = s.observe();
  json alerts = json::array();
  if (rec.shift) {
    alerts.push_back({{"kind", "shift"},
                      {"direction", to_string(rec.shift->direction)},
                      {"source", to_string(rec.shift->source)},
                      {"from", to_string(rec.shift->from_level)},
                      {"to", to_string(rec.shift->to_level)}});
  }
  if (rec.alert && rec.alert->find("pause") != std::string::npos) alerts.push_back({{"kind", "pause"}});
  const auto& d = s.distraction();
  json pending = d.pending() ? json(*d.pending()) : json(nullptr);
  json obstacle = nullptr;
  if (auto p = dynamic_obstacle_position(s.map(), obs.t)) obstacle = vec_json(*p);
  return frame({{"type", "state"},
                {"tick", s.tick_index() - 1},
                {"t", rec.t},
                {"pose", pose_json(s.pose())},
                {"loa", to_string(s.level())},
                {"d_min", rec.d_min},
                {"u_h", {{"v", rec.u_h.v}, {"omega", rec.u_h.omega}}},
                {"u_c", {{"v", rec.u_c.v}, {"omega", rec.u_c.omega}}},
                {"alerts", alerts},
                {"scan",
                 {{"angle_min", obs.scan.angle_min},
                  {"angle_increment", obs.scan.angle_increment()},
                  {"max_range", obs.scan.max_range},
                  {"ranges", obs.scan.ranges}}},
                {"obstacle", obstacle},
                {"distraction",
                 {{"needles", d.needles()}, {"pending", pending}, {"accuracy", d.accuracy()}}},
                {"paused", d.paused()},
                {"failed", s.failed()}});
}

fs::path SessionService::log_path() const {
  return opts_.log_dir / ("session_" + std::to_string(index_) + ".jsonl");
}

fs::path SessionService::inputs_path() const {
  return opts_.log_dir / ("session_" + std::to_string(index_) + ".inputs.jsonl");
}

void SessionService::finalize() {
  if (finalized_) return;
  finalized_ = true;
  if (!session_) return;
  fs::create_directories(opts_.log_dir);
  write_episode(log_path(), session_episode_log(cfg_, params_, session_->log()));
  write_file_atomic(inputs_path(), inputs_to_jsonl(params_, cfg_.distraction, session_->inputs()));
  spdlog::info("session {} finalized after {} ticks: {}", index_, session_->tick_index(), log_path().string());
}

// ---------------------------------------------------------------------------
// Transport

namespace {

class Connection : public std::enable_shared_from_this<Connection> {
 public:
  Connection(tcp::socket socket, const RunConfig& cfg, const ServeOptions& opts, int index)
      : ws_(std::move(socket)), timer_(ws_.get_executor()), service_(cfg, opts, index), clock_(opts.clock),
        dt_(std::chrono::duration_cast<std::chrono::steady_clock::duration>(std::chrono::duration<double>(cfg.sim.dt))) {}

  void start() {
    ws_.text(true);
    ws_.async_accept([self = shared_from_this()](beast::error_code ec) { self->on_accept(ec); });
  }

  void close() {
    beast::error_code ec;
    timer_.cancel();
    ws_.next_layer().socket().close(ec);
  }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) {
      spdlog::warn("websocket handshake failed: {}", ec.message());
      return;
    }
    send(service_.hello());
    read();
  }

  void read() {
    ws_.async_read(buffer_, [self = shared_from_this()](beast::error_code ec, std::size_t) { self->on_read(ec); });
  }

  void on_read(beast::error_code ec) {
    if (ec) {
      finish();
      return;
    }
    const auto text = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    for (auto& out : service_.handle(text)) send(std::move(out));
    // The realtime clock starts with the first client frame.
    if (clock_ == ClockMode::Realtime && !clock_started_ && !done_) {
      clock_started_ = true;
      next_tick_ = std::chrono::steady_clock::now() + dt_;
      schedule();
    }
    read();
  }

  void schedule() {
    timer_.expires_at(next_tick_);
    timer_.async_wait([self = shared_from_this()](beast::error_code ec) {
      if (ec || self->done_) return;
      self->send(self->service_.tick());
      self->next_tick_ += self->dt_;
      self->schedule();
    });
  }

  void send(std::string text) {
    if (done_) return;
    outbox_.push_back(std::move(text));
    if (!writing_) write_next();
  }

  void write_next() {
    writing_ = true;
    ws_.async_write(net::buffer(outbox_.front()), [self = shared_from_this()](beast::error_code ec, std::size_t) {
      self->outbox_.pop_front();
      if (ec) {
        self->writing_ = false;
        self->finish();
        return;
      }
      if (self->outbox_.empty()) {
        self->writing_ = false;
      } else {
        self->write_next();
      }
    });
  }

  void finish() {
    if (done_) return;
    done_ = true;
    timer_.cancel();
    try {
      service_.finalize();
    } catch (const std::exception& e) {
      spdlog::error("could not write session logs: {}", e.what());
    }
  }

  websocket::stream<beast::tcp_stream> ws_;
  net::steady_timer timer_;
  beast::flat_buffer buffer_;
  std::deque<std::string> outbox_;
  bool writing_ = false;
  bool done_ = false;
  bool clock_started_ = false;
  SessionService service_;
  ClockMode clock_;
  std::chrono::steady_clock::duration dt_;
  std::chrono::steady_clock::time_point next_tick_;
};

}  // namespace

struct Server::Impl {
  const RunConfig& cfg;
  ServeOptions opts;
  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  int next_index = 0;
  std::vector<std::weak_ptr<Connection>> connections;
  net::signal_set signals{ioc};

  Impl(const RunConfig& c, ServeOptions o) : cfg(c), opts(std::move(o)) {
    const tcp::endpoint ep(net::ip::make_address(opts.address), opts.port);
    acceptor.open(ep.protocol());
    acceptor.set_option(net::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen();
  }

  void accept() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto conn = std::make_shared<Connection>(std::move(socket), cfg, opts, next_index++);
      connections.push_back(conn);
      conn->start();
      accept();
    });
  }

  void shutdown() {
    beast::error_code ec;
    acceptor.close(ec);
    signals.cancel(ec);
    for (auto& w : connections) {
      if (auto c = w.lock()) c->close();
    }
  }
};

Server::Server(const RunConfig& cfg, ServeOptions opts) {
  try {
    impl_ = std::make_unique<Impl>(cfg, std::move(opts));
  } catch (const boost::system::system_error& e) {
    throw Error(std::string("cannot listen: ") + e.what());
  }
}

Server::~Server() = default;

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run(bool handle_signals) {
  if (handle_signals) {
    auto& signals = impl_->signals;
    signals.add(SIGINT);
    signals.add(SIGTERM);
    signals.async_wait([this](beast::error_code, int) { impl_->shutdown(); });
  }
  impl_->accept();
  spdlog::info("serving on {}:{}", impl_->opts.address, port());
  impl_->ioc.run();
}

void Server::stop() {
  net::post(impl_->ioc, [this] { impl_->shutdown(); });
}

}  // namespace loa
