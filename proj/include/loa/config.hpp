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

#ifndef LOA_CONFIG_HPP_
#define LOA_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "loa/dataset.hpp"
#include "loa/features.hpp"
#include "loa/learners.hpp"
#include "loa/session.hpp"

namespace loa {

// Thrown for configuration problems; the CLI maps it to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct EpisodePlan {
  int course_id = 1;
  OperatorProfile profile;
  LoaLevel initial_level = LoaLevel::A0;
  std::uint64_t seed = 0;
};

struct RunConfig {
  std::uint64_t seed = 0;
  std::vector<int> courses;
  std::vector<OperatorProfile> profiles;
  double episode_duration = 60.0;  // s
  SimConfig sim;
  SharedControlConfig control;
  DistractionConfig distraction;
  FeatureConfig features;
  double association_window = 0.25;  // s
  BalanceConfig balance;
  SplitFractions split;
  std::vector<LearnerKind> learners{kAllLearners.begin(), kAllLearners.end()};
  std::map<LearnerKind, std::vector<Hyperparameters>> grids;
  int chance_trials = 1000;
  bool parallel = false;
  std::filesystem::path output = "out";

  // Every course paired with every profile, in that order. The starting
  // level rotates with (course + profile index) mod 3.
  std::vector<EpisodePlan> episodes() const;
  void validate() const;
  // Canonical JSON of everything that affects results (not the output path).
  nlohmann::json canonical() const;
  std::string hash() const;
};

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace loa

#endif  // LOA_CONFIG_HPP_
