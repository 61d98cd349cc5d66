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

// JSONL encoding of episode logs. See docs/tick_schema.md.

#ifndef LOA_TICK_IO_HPP_
#define LOA_TICK_IO_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "loa/types.hpp"

namespace loa {

using Json = nlohmann::json;

void to_json(Json& j, const VelocityCommand& u);
void from_json(const Json& j, VelocityCommand& u);
void to_json(Json& j, const ShiftEvent& e);
void from_json(const Json& j, ShiftEvent& e);
void to_json(Json& j, const TickRecord& r);
void from_json(const Json& j, TickRecord& r);

struct EpisodeHeader {
  std::string config_hash;
  std::uint64_t seed = 0;
  int course_id = 0;
  std::string operator_id;
  Json profile = Json::object();
};

struct EpisodeLog {
  EpisodeHeader header;
  std::vector<TickRecord> ticks;
};

// Single line, no trailing newline. Doubles print in shortest round-trip form.
std::string tick_to_line(const TickRecord& r);
TickRecord tick_from_line(std::string_view line);

std::string episode_to_jsonl(const EpisodeLog& log);
EpisodeLog episode_from_jsonl(std::string_view text);

void write_episode(const std::filesystem::path& path, const EpisodeLog& log);
EpisodeLog read_episode(const std::filesystem::path& path);

}  // namespace loa

#endif  // LOA_TICK_IO_HPP_
