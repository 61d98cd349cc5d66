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

#include "loa/tick_io.hpp"

#include "loa/util.hpp"

namespace loa {

void to_json(Json& j, const VelocityCommand& u) { j = Json{{"v", u.v}, {"omega", u.omega}}; }

void from_json(const Json& j, VelocityCommand& u) {
  u.v = j.at("v").get<double>();
  u.omega = j.at("omega").get<double>();
}

void to_json(Json& j, const ShiftEvent& e) {
  j = Json{{"t", e.t},
           {"direction", to_string(e.direction)},
           {"source", to_string(e.source)},
           {"from_level", to_string(e.from_level)},
           {"to_level", to_string(e.to_level)}};
}

void from_json(const Json& j, ShiftEvent& e) {
  e.t = j.at("t").get<double>();
  e.direction = parse_direction(j.at("direction").get<std::string>());
  e.source = parse_source(j.at("source").get<std::string>());
  e.from_level = parse_level(j.at("from_level").get<std::string>());
  e.to_level = parse_level(j.at("to_level").get<std::string>());
}

void to_json(Json& j, const TickRecord& r) {
  j = Json::object();
  j["t"] = r.t;
  j["j_x"] = r.j_x;
  j["j_y"] = r.j_y;
  j["u_h"] = r.u_h;
  j["u_r"] = r.u_r;
  j["u_c"] = r.u_c;
  j["loa"] = to_string(r.loa);
  j["d_min"] = r.d_min;
  j["shift"] = r.shift ? Json(*r.shift) : Json(nullptr);
  if (r.alert) j["alert"] = *r.alert;
  j["course_id"] = r.course_id;
  j["operator_id"] = r.operator_id;
}

void from_json(const Json& j, TickRecord& r) {
  r.t = j.at("t").get<double>();
  r.j_x = j.at("j_x").get<double>();
  r.j_y = j.at("j_y").get<double>();
  r.u_h = j.at("u_h").get<VelocityCommand>();
  r.u_r = j.at("u_r").get<VelocityCommand>();
  r.u_c = j.at("u_c").get<VelocityCommand>();
  r.loa = parse_level(j.at("loa").get<std::string>());
  r.d_min = j.at("d_min").get<double>();
  if (r.d_min < 0.0) throw Error("TickRecord d_min must be non-negative");
  const auto& s = j.at("shift");
  r.shift = s.is_null() ? std::nullopt : std::optional<ShiftEvent>(s.get<ShiftEvent>());
  if (auto it = j.find("alert"); it != j.end() && !it->is_null()) {
    r.alert = it->get<std::string>();
  } else {
    r.alert.reset();
  }
  r.course_id = j.at("course_id").get<int>();
  r.operator_id = j.at("operator_id").get<std::string>();
}

std::string tick_to_line(const TickRecord& r) { return Json(r).dump(); }

TickRecord tick_from_line(std::string_view line) {
  return Json::parse(line.begin(), line.end()).get<TickRecord>();
}

std::string episode_to_jsonl(const EpisodeLog& log) {
  Json header = {{"format", "loa-episode"},
                 {"version", 1},
                 {"config_hash", log.header.config_hash},
                 {"seed", log.header.seed},
                 {"course_id", log.header.course_id},
                 {"operator_id", log.header.operator_id},
                 {"profile", log.header.profile}};
  std::string out = Json{{"header", header}}.dump();
  out += '\n';
  for (const auto& r : log.ticks) {
    out += tick_to_line(r);
    out += '\n';
  }
  return out;
}

EpisodeLog episode_from_jsonl(std::string_view text) {
  EpisodeLog log;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    if (line.empty()) continue;
    const Json j = Json::parse(line.begin(), line.end());
    if (auto it = j.find("header"); it != j.end()) {
      const auto& h = *it;
      log.header.config_hash = h.at("config_hash").get<std::string>();
      log.header.seed = h.at("seed").get<std::uint64_t>();
      log.header.course_id = h.at("course_id").get<int>();
      log.header.operator_id = h.at("operator_id").get<std::string>();
      log.header.profile = h.value("profile", Json::object());
      have_header = true;
      continue;
    }
    log.ticks.push_back(j.get<TickRecord>());
  }
  if (!have_header) throw Error("episode log has no header line");
  return log;
}

void write_episode(const std::filesystem::path& path, const EpisodeLog& log) {
  write_file_atomic(path, episode_to_jsonl(log));
}

EpisodeLog read_episode(const std::filesystem::path& path) {
  return episode_from_jsonl(read_file(path));
}

}  // namespace loa
