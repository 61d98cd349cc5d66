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

#ifndef LOA_EVALUATION_HPP_
#define LOA_EVALUATION_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "loa/dataset.hpp"
#include "loa/learners.hpp"

namespace loa {

// Counts indexed (true, predicted).
using ConfusionMatrix = Eigen::Matrix<std::int64_t, kNumClasses, kNumClasses>;

ConfusionMatrix confusion_matrix(std::span<const Label> truth, std::span<const Label> predicted);

// Mean recall over classes with at least one true example.
double balanced_accuracy(const ConfusionMatrix& cm);

// Mean F1 over classes that occur in the truth or the predictions; a class
// with precision + recall = 0 scores 0.
double macro_f1(const ConfusionMatrix& cm);

struct LevelScore {
  double balanced_accuracy = 0.0;
  std::int64_t count = 0;
};

// Count-weighted mean of per-level balanced accuracies.
double aggregate_balanced_accuracy(std::span<const LevelScore> per_loa);

struct ChanceInput {
  std::array<std::int64_t, kNumClasses> train_counts{};
  std::vector<Label> test_labels;
  std::int64_t weight = 0;  // aggregation weight of this level
};

// Aggregate balanced accuracy of a dummy classifier that draws each
// prediction from the train label distribution, averaged over `trials`.
double chance_baseline(std::span<const ChanceInput> per_loa, int trials, std::uint64_t seed);

// Published aggregate balanced accuracies kept in reports as annotations.
inline constexpr double kReferenceH = 0.592;
inline constexpr double kReferenceI = 0.854;
inline constexpr double kReferenceHIE = 0.919;
inline constexpr double kReferenceChance = 0.459;

struct CellResult {
  LoaLevel loa = LoaLevel::A0;
  StreamGroup stream = StreamGroup::H;
  LearnerKind best = LearnerKind::DecisionTree;
  Hyperparameters hp;
  double validation_macro_f1 = 0.0;
  double balanced_accuracy = 0.0;
  double macro_f1 = 0.0;
  ConfusionMatrix confusion = ConfusionMatrix::Zero();
  std::int64_t train_count = 0;
  std::int64_t test_count = 0;
};

struct StreamReport {
  std::string config_hash;
  std::vector<CellResult> cells;             // LOA-major, stream-minor
  std::map<StreamGroup, double> aggregate;   // per stream
  double chance = 0.0;
  int chance_trials = 0;

  nlohmann::json to_json() const;
  std::string to_csv() const;
};

struct ReportOptions {
  std::vector<LearnerKind> learners{kAllLearners.begin(), kAllLearners.end()};
  std::map<LearnerKind, std::vector<Hyperparameters>> grids;  // missing kinds use default_grid
  int chance_trials = 1000;
  std::uint64_t seed = 0;
  bool parallel = false;
};

// Per level and stream: grid-search every learner kind, keep the best by
// validation macro-F1 (first learner on ties), score it on test. Levels
// without data are skipped. Aggregates weight levels by train size.
StreamReport stream_comparison_report(const std::array<std::optional<DatasetSplit>, kNumLevels>& datasets,
                                      const ReportOptions& options);

// Best model per (level, stream) as selected inside the report.
struct SelectedModel {
  CellResult cell;
  TrainedModel model;
};
std::vector<SelectedModel> select_models(const std::array<std::optional<DatasetSplit>, kNumLevels>& datasets,
                                         const ReportOptions& options);

StreamReport report_from_selection(const std::array<std::optional<DatasetSplit>, kNumLevels>& datasets,
                                   const std::vector<SelectedModel>& selection, const ReportOptions& options);

}  // namespace loa

#endif  // LOA_EVALUATION_HPP_
