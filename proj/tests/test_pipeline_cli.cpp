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
#include <sys/wait.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>

#include "loa/config.hpp"
#include "loa/pipeline.hpp"
#include "loa/tick_io.hpp"
#include "loa/util.hpp"

namespace loa {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("loa_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(LOA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

json small_config() {
  return {{"seed", 3},
          {"courses", {2, 4}},
          {"profiles", {{{"name", "p"}, {"skill", 0.6}}}},
          {"episode_duration", 12.0}};
}

TEST(Config, ParsesAndValidates) {
  const auto cfg = parse_config(small_config());
  EXPECT_NO_THROW(cfg.validate());
  ASSERT_EQ(cfg.episodes().size(), 2u);
  EXPECT_EQ(cfg.episodes()[1].course_id, 4);
  EXPECT_NE(cfg.episodes()[0].seed, cfg.episodes()[1].seed);
}

TEST(Config, RejectsBadInput) {
  auto j = small_config();
  j["courses"] = {7};
  EXPECT_THROW(parse_config(j).validate(), ConfigError);
  j = small_config();
  j["colour"] = "red";
  EXPECT_THROW(parse_config(j), ConfigError);
  j = small_config();
  j["split"] = {{"train", 0.5}, {"validation", 0.2}, {"test", 0.2}};
  EXPECT_THROW(parse_config(j).validate(), ConfigError);
  j = small_config();
  j["profiles"] = {{{"name", "p"}}, {{"name", "p"}}};
  EXPECT_THROW(parse_config(j).validate(), ConfigError);
  j = small_config();
  j["grids"] = {{"DecisionTree", {{{"max_depth", -1}}}}};
  EXPECT_THROW(parse_config(j).validate(), ConfigError);
}

TEST(Config, HashIgnoresOutputPath) {
  auto j = small_config();
  const auto a = parse_config(j);
  j["output"] = "elsewhere";
  EXPECT_EQ(parse_config(j).hash(), a.hash());
  j["seed"] = 4;
  EXPECT_NE(parse_config(j).hash(), a.hash());
}

TEST(Pipeline, ExtractRowsAreTicksMinusWarmup) {
  const auto dir = scratch("extract");
  const auto cfg = parse_config(small_config());
  const auto g = cmd_generate(cfg, dir);
  EXPECT_EQ(g.episodes, 2);
  const auto rows = cmd_extract(cfg, dir);
  EXPECT_EQ(rows, g.ticks - 39 * g.episodes);
  const auto manifest = json::parse(read_file(dir / "features" / "manifest.json"));
  EXPECT_EQ(manifest.at("rows").get<std::int64_t>(), rows);
  EXPECT_EQ(manifest.at("config_hash"), cfg.hash());
  // Generating again rewrites identical bytes.
  const auto first = read_file(dir / "episodes" / "ep_000.jsonl");
  cmd_generate(cfg, dir);
  EXPECT_EQ(read_file(dir / "episodes" / "ep_000.jsonl"), first);
  fs::remove_all(dir);
}

TEST(Pipeline, MissingUpstreamThrows) {
  const auto dir = scratch("missing");
  const auto cfg = parse_config(small_config());
  EXPECT_THROW(cmd_extract(cfg, dir), Error);
  EXPECT_THROW(cmd_train(cfg, dir), Error);
  fs::remove_all(dir);
}

TEST(Pipeline, SmokeRunIsDeterministic) {
  const auto cfg = load_config(fs::path(LOA_SOURCE_DIR) / "configs" / "smoke.json");
  std::string reports[2];
  for (int run = 0; run < 2; ++run) {
    const auto dir = scratch("smoke_" + std::to_string(run));
    cmd_generate(cfg, dir);
    cmd_extract(cfg, dir);
    const auto start = std::chrono::steady_clock::now();
    cmd_train(cfg, dir);
    const double train_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(train_s, 120.0);
    cmd_evaluate(cfg, dir);
    const auto r = cmd_report(cfg, dir);
    reports[run] = read_file(dir / "report.json") + read_file(dir / "report.csv");
    EXPECT_EQ(report_from_json(json::parse(read_file(dir / "report.json"))).to_json(), r.to_json());
    // Evaluating again yields the same bytes.
    cmd_evaluate(cfg, dir);
    cmd_report(cfg, dir);
    EXPECT_EQ(read_file(dir / "report.json") + read_file(dir / "report.csv"), reports[run]);
    fs::remove_all(dir);
  }
  EXPECT_EQ(reports[0], reports[1]);
}

TEST(Cli, ZeroEpisodesWritesEmptyManifest) {
  const auto dir = scratch("cli_zero");
  auto j = small_config();
  j["courses"] = json::array();
  write_file_atomic(dir / "config.json", j.dump());
  EXPECT_EQ(run_cli("generate --config " + (dir / "config.json").string() + " --out " + (dir / "out").string()), 0);
  const auto manifest = json::parse(read_file(dir / "out" / "episodes" / "manifest.json"));
  EXPECT_TRUE(manifest.at("episodes").empty());
  fs::remove_all(dir);
}

TEST(Cli, InvalidConfigurationExitsTwo) {
  const auto dir = scratch("cli_bad");
  auto j = small_config();
  j["courses"] = {0};
  write_file_atomic(dir / "config.json", j.dump());
  EXPECT_EQ(run_cli("generate --config " + (dir / "config.json").string() + " --out " + (dir / "out").string()), 2);
  EXPECT_FALSE(fs::exists(dir / "out" / "episodes" / "manifest.json"));
  write_file_atomic(dir / "broken.json", "{\"seed\": ");
  EXPECT_EQ(run_cli("generate --config " + (dir / "broken.json").string()), 2);
  EXPECT_EQ(run_cli("generate"), 2);
  EXPECT_EQ(run_cli("frobnicate --config x"), 2);
  EXPECT_EQ(run_cli("generate --config " + (dir / "absent.json").string()), 2);
  fs::remove_all(dir);
}

TEST(Cli, MissingArtifactExitsOne) {
  const auto dir = scratch("cli_missing");
  write_file_atomic(dir / "config.json", small_config().dump());
  EXPECT_EQ(run_cli("train --config " + (dir / "config.json").string() + " --out " + (dir / "out").string()), 1);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace loa
