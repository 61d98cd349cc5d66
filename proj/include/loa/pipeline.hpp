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

// Offline pipeline stages. Each stage reads the previous stage's artifacts
// under the output directory and writes its own, every file through a
// write-then-rename. Manifests carry the config hash; a mismatch with the
// current config is logged as a warning.
//
//   generate  episodes/ep_NNN.jsonl, episodes/manifest.json
//   extract   features/features.csv, features/manifest.json
//   train     datasets/loa_Ax/{train,validation,test}.csv, datasets/manifest.json,
//             models/loa_Ax_<stream>.json, models/manifest.json
//   evaluate  evaluation.json
//   report    report.json, report.csv

#ifndef LOA_PIPELINE_HPP_
#define LOA_PIPELINE_HPP_

#include <filesystem>

#include "json.hpp"
#include "loa/config.hpp"
#include "loa/evaluation.hpp"

namespace loa {

struct GenerateSummary {
  int episodes = 0;
  std::int64_t ticks = 0;
  int shifts = 0;
  int failures = 0;
};

GenerateSummary cmd_generate(const RunConfig& cfg, const std::filesystem::path& out);
std::int64_t cmd_extract(const RunConfig& cfg, const std::filesystem::path& out);
void cmd_train(const RunConfig& cfg, const std::filesystem::path& out);
StreamReport cmd_evaluate(const RunConfig& cfg, const std::filesystem::path& out);
StreamReport cmd_report(const RunConfig& cfg, const std::filesystem::path& out);

StreamReport report_from_json(const nlohmann::json& j);

// Per-level rebalanced and split datasets as the train stage builds them.
std::array<std::optional<DatasetSplit>, kNumLevels> prepare_datasets(const RunConfig& cfg,
                                                                     std::span<const LabeledExample> examples);

}  // namespace loa

#endif  // LOA_PIPELINE_HPP_
