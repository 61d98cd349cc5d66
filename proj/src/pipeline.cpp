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

#include "loa/pipeline.hpp"

#include <cstdio>

#include <spdlog/spdlog.h>

#include "loa/util.hpp"

namespace loa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string episode_file(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "ep_%03zu.jsonl", i);
  return buf;
}

std::string level_dir(LoaLevel l) { return "loa_" + std::string(to_string(l)); }

std::string stream_slug(StreamGroup g) {
  switch (g) {
    case StreamGroup::H: return "H";
    case StreamGroup::I: return "I";
    case StreamGroup::HIE: return "HIE";
  }
  return "?";
}

json read_json(const fs::path& p) {
  if (!fs::exists(p)) throw Error("missing upstream artifact " + p.string());
  return json::parse(read_file(p));
}

void write_json(const fs::path& p, const json& j) { write_file_atomic(p, j.dump(2) + "\n"); }

void check_hash(const json& manifest, const RunConfig& cfg, const fs::path& where) {
  const auto recorded = manifest.value("config_hash", std::string());
  if (recorded != cfg.hash()) {
    spdlog::warn("{} was produced by config {} but the current config hashes to {}", where.string(), recorded,
                 cfg.hash());
  }
}

json counts_json(const std::vector<Label>& y) {
  const auto c = class_counts(y);
  return {{"shift_up", c[0]}, {"no_shift", c[1]}, {"shift_down", c[2]}};
}

}  // namespace

GenerateSummary cmd_generate(const RunConfig& cfg, const fs::path& out) {
  cfg.validate();
  const auto dir = out / "episodes";
  fs::create_directories(dir);
  GenerateSummary summary;
  json entries = json::array();
  const auto plans = cfg.episodes();
  for (std::size_t i = 0; i < plans.size(); ++i) {
    const auto& plan = plans[i];
    EpisodeSpec spec;
    spec.sim = cfg.sim;
    spec.control = cfg.control;
    spec.course_id = plan.course_id;
    spec.profile = plan.profile;
    spec.initial_level = plan.initial_level;
    spec.duration = cfg.episode_duration;
    spec.config_hash = cfg.hash();
    spec.seed = plan.seed;
    const auto result = run_scripted_episode(spec);
    const auto file = episode_file(i);
    write_episode(dir / file, result.log);

    const auto ticks = static_cast<std::int64_t>(result.log.ticks.size());
    spdlog::info("episode {} course {} operator {} start {}: {} ticks, {} shifts, {} bumps{}", i, plan.course_id,
                 plan.profile.name, to_string(plan.initial_level), ticks, result.shifts, result.bumps,
                 result.failed ? ", collision with moving obstacle" : "");
    entries.push_back({{"file", file},
                       {"course_id", plan.course_id},
                       {"operator_id", plan.profile.name},
                       {"initial_loa", to_string(plan.initial_level)},
                       {"seed", plan.seed},
                       {"ticks", ticks},
                       {"shifts", result.shifts},
                       {"bumps", result.bumps},
                       {"laps", result.laps},
                       {"failed", result.failed}});
    ++summary.episodes;
    summary.ticks += ticks;
    summary.shifts += result.shifts;
    summary.failures += result.failed ? 1 : 0;
  }
  write_json(dir / "manifest.json", {{"format", "loa-episodes"},
                                     {"version", 1},
                                     {"config_hash", cfg.hash()},
                                     {"episodes", entries},
                                     {"total_ticks", summary.ticks},
                                     {"total_shifts", summary.shifts}});
  return summary;
}

std::int64_t cmd_extract(const RunConfig& cfg, const fs::path& out) {
  cfg.validate();
  const auto manifest = read_json(out / "episodes" / "manifest.json");
  check_hash(manifest, cfg, out / "episodes");

  std::string csv = features_csv_header() + "\n";
  std::int64_t rows = 0;
  std::int64_t ticks = 0;
  std::vector<Label> all_labels;
  for (const auto& e : manifest.at("episodes")) {
    const auto log = read_episode(out / "episodes" / e.at("file").get<std::string>());
    const auto labels = label_ticks(log.ticks, cfg.association_window);
    FeatureExtractor ex(cfg.features, cfg.sim.dt);
    ticks += static_cast<std::int64_t>(log.ticks.size());
    for (std::size_t i = 0; i < log.ticks.size(); ++i) {
      const auto f = ex.push(log.ticks[i]);
      if (!f.complete) continue;
      LabeledExample ex_row{f, labels[i], log.ticks[i].loa};
      csv += features_csv_row(ex_row);
      csv += '\n';
      all_labels.push_back(labels[i]);
      ++rows;
    }
  }
  fs::create_directories(out / "features");
  write_file_atomic(out / "features" / "features.csv", csv);
  write_json(out / "features" / "manifest.json", {{"format", "loa-features"},
                                                  {"version", 1},
                                                  {"config_hash", cfg.hash()},
                                                  {"ticks", ticks},
                                                  {"rows", rows},
                                                  {"labels", counts_json(all_labels)}});
  spdlog::info("extracted {} feature rows from {} ticks", rows, ticks);
  return rows;
}

std::array<std::optional<DatasetSplit>, kNumLevels> prepare_datasets(const RunConfig& cfg,
                                                                     std::span<const LabeledExample> examples) {
  std::array<std::optional<DatasetSplit>, kNumLevels> out;
  const auto parts = partition_by_loa(examples);
  for (int l = 0; l < kNumLevels; ++l) {
    const auto level = static_cast<LoaLevel>(l);
    const auto tag = std::string(to_string(level));
    try {
      BalanceConfig bc = cfg.balance;
      bc.seed = derive_seed(cfg.seed, "balance:" + tag);
      const auto balanced = rebalance(parts[static_cast<std::size_t>(l)], bc);
      out[static_cast<std::size_t>(l)] = split(to_table(balanced), cfg.split, derive_seed(cfg.seed, "split:" + tag));
    } catch (const Error& e) {
      spdlog::warn("level {} skipped: {}", tag, e.what());
    }
  }
  return out;
}

void cmd_train(const RunConfig& cfg, const fs::path& out) {
  cfg.validate();
  const auto fmanifest = read_json(out / "features" / "manifest.json");
  check_hash(fmanifest, cfg, out / "features");
  const auto examples = read_features_csv(read_file(out / "features" / "features.csv"));
  const auto datasets = prepare_datasets(cfg, examples);

  json levels = json::object();
  for (int l = 0; l < kNumLevels; ++l) {
    const auto level = static_cast<LoaLevel>(l);
    const auto& ds = datasets[static_cast<std::size_t>(l)];
    if (!ds) continue;
    const auto dir = out / "datasets" / level_dir(level);
    fs::create_directories(dir);
    write_file_atomic(dir / "train.csv", table_to_csv(ds->train));
    write_file_atomic(dir / "validation.csv", table_to_csv(ds->validation));
    write_file_atomic(dir / "test.csv", table_to_csv(ds->test));
    const auto tag = std::string(to_string(level));
    levels[tag] = {{"balance_seed", derive_seed(cfg.seed, "balance:" + tag)},
                   {"split_seed", derive_seed(cfg.seed, "split:" + tag)},
                   {"train", counts_json(ds->train.y)},
                   {"validation", counts_json(ds->validation.y)},
                   {"test", counts_json(ds->test.y)},
                   {"mean", std::vector<double>(ds->mean.data(), ds->mean.data() + ds->mean.size())},
                   {"stddev", std::vector<double>(ds->stddev.data(), ds->stddev.data() + ds->stddev.size())}};
  }
  fs::create_directories(out / "datasets");
  write_json(out / "datasets" / "manifest.json", {{"format", "loa-datasets"},
                                                  {"version", 1},
                                                  {"config_hash", cfg.hash()},
                                                  {"columns", kFeatureColumns},
                                                  {"levels", levels}});

  ReportOptions opts;
  opts.learners = cfg.learners;
  opts.grids = cfg.grids;
  opts.chance_trials = cfg.chance_trials;
  opts.seed = cfg.seed;
  opts.parallel = cfg.parallel;
  const auto selection = select_models(datasets, opts);

  fs::create_directories(out / "models");
  json entries = json::array();
  for (const auto& s : selection) {
    auto model = s.model;
    model.train_hash = cfg.hash();
    const auto file = level_dir(s.cell.loa) + "_" + stream_slug(s.cell.stream) + ".json";
    write_json(out / "models" / file, model_to_json(model));
    entries.push_back({{"file", file},
                       {"loa", to_string(s.cell.loa)},
                       {"stream", to_string(s.cell.stream)},
                       {"learner", to_string(s.cell.best)},
                       {"hp", s.cell.hp.values},
                       {"validation_macro_f1", s.cell.validation_macro_f1}});
    spdlog::info("level {} stream {}: {} (validation macro-F1 {:.4f})", to_string(s.cell.loa),
                 to_string(s.cell.stream), to_string(s.cell.best), s.cell.validation_macro_f1);
  }
  write_json(out / "models" / "manifest.json",
             {{"format", "loa-models"}, {"version", 1}, {"config_hash", cfg.hash()}, {"models", entries}});
}

StreamReport cmd_evaluate(const RunConfig& cfg, const fs::path& out) {
  cfg.validate();
  const auto dmanifest = read_json(out / "datasets" / "manifest.json");
  const auto mmanifest = read_json(out / "models" / "manifest.json");
  check_hash(dmanifest, cfg, out / "datasets");
  check_hash(mmanifest, cfg, out / "models");

  std::array<std::optional<DatasetSplit>, kNumLevels> datasets;
  for (const auto& [tag, _] : dmanifest.at("levels").items()) {
    const auto level = parse_level(tag);
    const auto dir = out / "datasets" / level_dir(level);
    DatasetSplit ds;
    ds.train = table_from_csv(read_file(dir / "train.csv"));
    ds.validation = table_from_csv(read_file(dir / "validation.csv"));
    ds.test = table_from_csv(read_file(dir / "test.csv"));
    datasets[static_cast<std::size_t>(index(level))] = std::move(ds);
  }

  std::vector<SelectedModel> selection;
  for (const auto& e : mmanifest.at("models")) {
    SelectedModel s;
    s.model = model_from_json(read_json(out / "models" / e.at("file").get<std::string>()));
    s.cell.loa = parse_level(e.at("loa").get<std::string>());
    s.cell.stream = parse_stream(e.at("stream").get<std::string>());
    s.cell.best = parse_learner(e.at("learner").get<std::string>());
    s.cell.hp.values = e.at("hp").get<std::map<std::string, double>>();
    s.cell.validation_macro_f1 = e.at("validation_macro_f1").get<double>();
    selection.push_back(std::move(s));
  }

  ReportOptions opts;
  opts.chance_trials = cfg.chance_trials;
  opts.seed = cfg.seed;
  auto report = report_from_selection(datasets, selection, opts);
  report.config_hash = cfg.hash();
  write_json(out / "evaluation.json", report.to_json());
  return report;
}

StreamReport report_from_json(const json& j) {
  if (j.at("format") != "loa-stream-report" || j.at("version").get<int>() != 1) {
    throw Error("not a version 1 stream report");
  }
  StreamReport r;
  r.config_hash = j.at("config_hash").get<std::string>();
  for (const auto& c : j.at("cells")) {
    CellResult cell;
    cell.loa = parse_level(c.at("loa").get<std::string>());
    cell.stream = parse_stream(c.at("stream").get<std::string>());
    cell.best = parse_learner(c.at("best_learner").get<std::string>());
    cell.hp.values = c.at("hp").get<std::map<std::string, double>>();
    cell.validation_macro_f1 = c.at("validation_macro_f1").get<double>();
    cell.balanced_accuracy = c.at("balanced_accuracy").get<double>();
    cell.macro_f1 = c.at("macro_f1").get<double>();
    for (int a = 0; a < kNumClasses; ++a) {
      for (int b = 0; b < kNumClasses; ++b) cell.confusion(a, b) = c.at("confusion").at(a).at(b).get<std::int64_t>();
    }
    cell.train_count = c.at("train_count").get<std::int64_t>();
    cell.test_count = c.at("test_count").get<std::int64_t>();
    r.cells.push_back(cell);
  }
  for (const auto& [name, v] : j.at("aggregate_balanced_accuracy").items()) r.aggregate[parse_stream(name)] = v.get<double>();
  r.chance = j.at("chance").get<double>();
  r.chance_trials = j.at("chance_trials").get<int>();
  return r;
}

StreamReport cmd_report(const RunConfig& cfg, const fs::path& out) {
  cfg.validate();
  const auto j = read_json(out / "evaluation.json");
  check_hash(j, cfg, out / "evaluation.json");
  const auto report = report_from_json(j);
  write_json(out / "report.json", report.to_json());
  write_file_atomic(out / "report.csv", report.to_csv());
  for (const auto& [g, score] : report.aggregate) {
    spdlog::info("stream {}: aggregate balanced accuracy {:.4f}", to_string(g), score);
  }
  spdlog::info("chance: {:.4f}", report.chance);
  return report;
}

}  // namespace loa
