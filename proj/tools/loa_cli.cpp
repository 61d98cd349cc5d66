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

// loa: command-line entry point for the offline pipeline and the session
// service.
//
//   loa generate|extract|train|evaluate|report --config <path> [--seed n] [--out dir]
//   loa serve --config <path> [--port n] [--lockstep] [--out dir]
//
// LOA_LOG_LEVEL selects log verbosity (trace, debug, info, warn, error, off).
// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration or
// arguments.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "loa/config.hpp"
#include "loa/pipeline.hpp"
#include "loa/server.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("loa");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("LOA_LOG_LEVEL")) {
    const auto level = spdlog::level::from_str(env);
    spdlog::set_level(level);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{"Levels-of-autonomy shared-control toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  unsigned short port = 8765;
  bool lockstep = false;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "Run configuration JSON")->required();
    cmd->add_option("--seed", seed, "Override the base seed");
    cmd->add_option("--out", out, "Output directory (overrides the config)");
  };

  auto* generate = app.add_subcommand("generate", "Run scripted episodes and write JSONL logs");
  auto* extract = app.add_subcommand("extract", "Compute labeled feature rows from episode logs");
  auto* train = app.add_subcommand("train", "Balance, split and grid-search learners per level and stream");
  auto* evaluate = app.add_subcommand("evaluate", "Score the selected models on the test partitions");
  auto* report = app.add_subcommand("report", "Write the stream comparison report as JSON and CSV");
  auto* serve = app.add_subcommand("serve", "Serve live sessions over WebSocket");
  for (auto* cmd : {generate, extract, train, evaluate, report, serve}) add_common(cmd);
  serve->add_option("--port", port, "TCP port (0 picks a free one)");
  serve->add_flag("--lockstep", lockstep, "Advance one tick per joystick message instead of at 20 Hz");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    loa::RunConfig cfg = loa::load_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out) cfg.output = *out;
    cfg.validate();
    const auto dir = cfg.output;
    spdlog::debug("config hash {}", cfg.hash());

    if (generate->parsed()) {
      const auto s = loa::cmd_generate(cfg, dir);
      std::printf("episodes %d ticks %lld shifts %d (%.2f per episode) failures %d\n", s.episodes,
                  static_cast<long long>(s.ticks), s.shifts,
                  s.episodes > 0 ? static_cast<double>(s.shifts) / s.episodes : 0.0, s.failures);
    } else if (extract->parsed()) {
      loa::cmd_extract(cfg, dir);
    } else if (train->parsed()) {
      loa::cmd_train(cfg, dir);
    } else if (evaluate->parsed()) {
      loa::cmd_evaluate(cfg, dir);
    } else if (report->parsed()) {
      const auto r = loa::cmd_report(cfg, dir);
      std::fputs(r.to_csv().c_str(), stdout);
    } else if (serve->parsed()) {
      loa::ServeOptions opts;
      opts.port = port;
      opts.clock = lockstep ? loa::ClockMode::Lockstep : loa::ClockMode::Realtime;
      opts.log_dir = dir / "sessions";
      loa::Server server(cfg, opts);
      std::printf("listening on port %u\n", static_cast<unsigned>(server.port()));
      std::fflush(stdout);
      server.run(true);
    }
  } catch (const loa::ConfigError& e) {
    spdlog::error("invalid configuration: {}", e.what());
    return 2;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
