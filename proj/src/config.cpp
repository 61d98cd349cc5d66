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

#include "loa/config.hpp"

#include <set>

#include "loa/util.hpp"

namespace loa {

using nlohmann::json;

namespace {

void check_keys(const json& j, const char* section, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(section) + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items()) {
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + section);
  }
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config value '") + key + "' has the wrong type");
  }
}

json hp_grid_to_json(const std::vector<Hyperparameters>& grid) {
  json out = json::array();
  for (const auto& hp : grid) out.push_back(hp.values);
  return out;
}

}  // namespace

std::vector<EpisodePlan> RunConfig::episodes() const {
  std::vector<EpisodePlan> out;
  for (int course : courses) {
    for (std::size_t p = 0; p < profiles.size(); ++p) {
      EpisodePlan e;
      e.course_id = course;
      e.profile = profiles[p];
      e.initial_level = static_cast<LoaLevel>((course + static_cast<int>(p)) % kNumLevels);
      e.seed = derive_seed(seed, "episode:" + std::to_string(out.size()));
      out.push_back(std::move(e));
    }
  }
  return out;
}

void RunConfig::validate() const {
  try {
    for (int c : courses) {
      if (c < 1 || c > 6) throw ConfigError("course id " + std::to_string(c) + " is not in 1..6");
    }
    std::set<std::string> names;
    for (const auto& p : profiles) {
      p.validate();
      if (!names.insert(p.name).second) throw ConfigError("duplicate operator profile '" + p.name + "'");
    }
    if (!(episode_duration > 0.0)) throw ConfigError("episode_duration must be positive");
    if (!(sim.dt > 0.0)) throw ConfigError("sim.dt must be positive");
    if (sim.beams < 8) throw ConfigError("sim.beams must be at least 8");
    if (!(sim.max_range > 0.0) || !(sim.chair_radius > 0.0)) throw ConfigError("sim ranges must be positive");
    if (!(sim.deadzone >= 0.0 && sim.deadzone < 1.0)) throw ConfigError("sim.deadzone must lie in [0, 1)");
    control.validate();
    features.validate();
    if (!(association_window > 0.0)) throw ConfigError("association_window must be positive");
    if (!(balance.majority_share > 0.0 && balance.majority_share < 1.0)) {
      throw ConfigError("balance.majority_share must lie in (0, 1)");
    }
    const double total = split.train + split.validation + split.test;
    if (split.train <= 0.0 || split.validation <= 0.0 || split.test <= 0.0 || std::abs(total - 1.0) > 1e-9) {
      throw ConfigError("split fractions must be positive and sum to 1");
    }
    if (learners.empty()) throw ConfigError("at least one learner is required");
    for (const auto& [kind, grid] : grids) {
      if (grid.empty()) throw ConfigError("grid for " + std::string(to_string(kind)) + " is empty");
      for (const auto& hp : grid) loa::validate(kind, hp);
    }
    if (chance_trials < 100) throw ConfigError("chance_trials must be at least 100");
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

json RunConfig::canonical() const {
  json profiles_json = json::array();
  for (const auto& p : profiles) profiles_json.push_back(profile_to_json(p));
  json grids_json = json::object();
  for (const auto& [kind, grid] : grids) grids_json[std::string(to_string(kind))] = hp_grid_to_json(grid);
  json learners_json = json::array();
  for (auto k : learners) learners_json.push_back(to_string(k));
  return {
      {"seed", seed},
      {"courses", courses},
      {"profiles", profiles_json},
      {"episode_duration", episode_duration},
      {"sim",
       {{"dt", sim.dt},
        {"v_max", sim.limits.v_max},
        {"omega_max", sim.limits.omega_max},
        {"deadzone", sim.deadzone},
        {"chair_radius", sim.chair_radius},
        {"beams", sim.beams},
        {"max_range", sim.max_range},
        {"range_noise_std", sim.range_noise_std}}},
      {"shared_control",
       {{"alpha", control.blending.alpha},
        {"delta_low", control.safety.delta_low},
        {"delta_high", control.safety.delta_high},
        {"tau", control.safety.tau},
        {"stop_horizon", control.stop_horizon},
        {"lookahead", control.lookahead}}},
      {"distraction",
       {{"enabled", distraction.enabled},
        {"gauges", distraction.gauges},
        {"malfunction_rate", distraction.malfunction_rate},
        {"response_timeout", distraction.response_timeout},
        {"window", distraction.window},
        {"threshold", distraction.threshold}}},
      {"features",
       {{"sparc_window", features.sparc_window},
        {"amplitude_threshold", features.amplitude_threshold},
        {"cutoff_max", features.cutoff_max},
        {"pad_level", features.pad_level},
        {"freq_n", features.freq_n},
        {"beta", features.beta},
        {"agreement_n", features.agreement_n},
        {"projection_horizon", features.projection_horizon},
        {"projection_dt", features.projection_dt},
        {"d_clamp_low", features.d_clamp_low},
        {"d_clamp_high", features.d_clamp_high}}},
      {"association_window", association_window},
      {"balance", {{"majority_share", balance.majority_share}}},
      {"split", {{"train", split.train}, {"validation", split.validation}, {"test", split.test}}},
      {"learners", learners_json},
      {"grids", grids_json},
      {"chance_trials", chance_trials},
  };
}

std::string RunConfig::hash() const { return hex64(fnv1a64(canonical().dump())); }

RunConfig parse_config(const json& j) {
  RunConfig c;
  check_keys(j, "config",
             {"seed", "courses", "profiles", "episode_duration", "sim", "shared_control", "distraction", "features",
              "association_window", "balance", "split", "learners", "grids", "chance_trials", "parallel", "output"});
  read(j, "seed", c.seed);
  read(j, "courses", c.courses);
  if (j.contains("profiles")) {
    if (!j.at("profiles").is_array()) throw ConfigError("profiles must be an array");
    for (const auto& p : j.at("profiles")) {
      check_keys(p, "profile",
                 {"name", "skill", "distraction_rate", "noise_amplitude", "shift_up_threshold", "shift_down_threshold",
                  "seed", "cruise", "steering_gain", "distraction_duration", "proximity_gain", "disagreement_gain",
                  "distraction_gain", "distress_time_constant", "request_cooldown"});
      try {
        c.profiles.push_back(profile_from_json(p));
      } catch (const std::exception& e) {
        throw ConfigError(std::string("profile: ") + e.what());
      }
    }
  }
  read(j, "episode_duration", c.episode_duration);
  if (j.contains("sim")) {
    const auto& s = j.at("sim");
    check_keys(s, "sim", {"dt", "v_max", "omega_max", "deadzone", "chair_radius", "beams", "max_range", "range_noise_std"});
    read(s, "dt", c.sim.dt);
    read(s, "v_max", c.sim.limits.v_max);
    read(s, "omega_max", c.sim.limits.omega_max);
    read(s, "deadzone", c.sim.deadzone);
    read(s, "chair_radius", c.sim.chair_radius);
    read(s, "beams", c.sim.beams);
    read(s, "max_range", c.sim.max_range);
    read(s, "range_noise_std", c.sim.range_noise_std);
  }
  if (j.contains("shared_control")) {
    const auto& s = j.at("shared_control");
    check_keys(s, "shared_control", {"alpha", "delta_low", "delta_high", "tau", "stop_horizon", "lookahead"});
    read(s, "alpha", c.control.blending.alpha);
    read(s, "delta_low", c.control.safety.delta_low);
    read(s, "delta_high", c.control.safety.delta_high);
    read(s, "tau", c.control.safety.tau);
    read(s, "stop_horizon", c.control.stop_horizon);
    read(s, "lookahead", c.control.lookahead);
  }
  if (j.contains("distraction")) {
    const auto& s = j.at("distraction");
    check_keys(s, "distraction", {"enabled", "gauges", "malfunction_rate", "response_timeout", "window", "threshold"});
    read(s, "enabled", c.distraction.enabled);
    read(s, "gauges", c.distraction.gauges);
    read(s, "malfunction_rate", c.distraction.malfunction_rate);
    read(s, "response_timeout", c.distraction.response_timeout);
    read(s, "window", c.distraction.window);
    read(s, "threshold", c.distraction.threshold);
  }
  if (j.contains("features")) {
    const auto& s = j.at("features");
    check_keys(s, "features",
               {"sparc_window", "amplitude_threshold", "cutoff_max", "pad_level", "freq_n", "beta", "agreement_n",
                "projection_horizon", "projection_dt", "d_clamp_low", "d_clamp_high"});
    read(s, "sparc_window", c.features.sparc_window);
    read(s, "amplitude_threshold", c.features.amplitude_threshold);
    read(s, "cutoff_max", c.features.cutoff_max);
    read(s, "pad_level", c.features.pad_level);
    read(s, "freq_n", c.features.freq_n);
    read(s, "beta", c.features.beta);
    read(s, "agreement_n", c.features.agreement_n);
    read(s, "projection_horizon", c.features.projection_horizon);
    read(s, "projection_dt", c.features.projection_dt);
    read(s, "d_clamp_low", c.features.d_clamp_low);
    read(s, "d_clamp_high", c.features.d_clamp_high);
  }
  c.features.deadzone = c.sim.deadzone;
  read(j, "association_window", c.association_window);
  if (j.contains("balance")) {
    check_keys(j.at("balance"), "balance", {"majority_share"});
    read(j.at("balance"), "majority_share", c.balance.majority_share);
  }
  if (j.contains("split")) {
    const auto& s = j.at("split");
    check_keys(s, "split", {"train", "validation", "test"});
    read(s, "train", c.split.train);
    read(s, "validation", c.split.validation);
    read(s, "test", c.split.test);
  }
  if (j.contains("learners")) {
    c.learners.clear();
    std::vector<std::string> names;
    read(j, "learners", names);
    try {
      for (const auto& n : names) c.learners.push_back(parse_learner(n));
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("grids")) {
    const auto& g = j.at("grids");
    if (!g.is_object()) throw ConfigError("grids must be an object");
    for (const auto& [name, points] : g.items()) {
      LearnerKind kind;
      try {
        kind = parse_learner(name);
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
      std::vector<Hyperparameters> grid;
      if (!points.is_array()) throw ConfigError("grid for " + name + " must be an array");
      for (const auto& p : points) {
        Hyperparameters hp;
        try {
          hp.values = p.get<std::map<std::string, double>>();
        } catch (const json::exception&) {
          throw ConfigError("grid point for " + name + " must map names to numbers");
        }
        grid.push_back(std::move(hp));
      }
      c.grids[kind] = std::move(grid);
    }
  }
  read(j, "chance_trials", c.chance_trials);
  read(j, "parallel", c.parallel);
  if (j.contains("output")) c.output = j.at("output").get<std::string>();
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_config(j);
}

}  // namespace loa
