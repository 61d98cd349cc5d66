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

#ifndef LOA_DATASET_HPP_
#define LOA_DATASET_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "loa/features.hpp"
#include "loa/types.hpp"

namespace loa {

// Class indices follow y0 = shift-up, y1 = no-shift, y2 = shift-down.
enum class Label : int { ShiftUp = 0, NoShift = 1, ShiftDown = 2 };
inline constexpr int kNumClasses = 3;

std::string_view to_string(Label l);
Label parse_label(std::string_view s);
inline int index(Label l) { return static_cast<int>(l); }

struct LabeledExample {
  FeatureVector features;
  Label label = Label::NoShift;
  LoaLevel loa = LoaLevel::A0;
};

// A tick is labeled with the direction of a shift event in
// [t, t + association_window); the nearest event wins when several fall in
// the window. Otherwise NoShift.
std::vector<Label> label_ticks(std::span<const TickRecord> log, double association_window);

std::array<std::vector<LabeledExample>, kNumLevels> partition_by_loa(std::span<const LabeledExample> examples);

struct BalanceConfig {
  double majority_share = 0.90;
  std::uint64_t seed = 0;
};

// Down-samples NoShift without replacement so the shift classes form
// 1 - majority_share of the output. Order of kept examples is preserved.
std::vector<LabeledExample> rebalance(std::span<const LabeledExample> examples, const BalanceConfig& cfg);

enum class StreamGroup { H, I, HIE };
std::string_view to_string(StreamGroup g);
StreamGroup parse_stream(std::string_view s);
inline constexpr std::array<StreamGroup, 3> kAllStreams = {StreamGroup::H, StreamGroup::I, StreamGroup::HIE};

// Column names of the full feature row, in this order.
inline constexpr std::array<const char*, 5> kFeatureColumns = {"H_Omega", "H_S", "I_C", "I_S", "E_d"};
std::vector<int> stream_columns(StreamGroup g);

// Examples as a dense table; missing smoothness values are NaN.
struct FeatureTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd x;
  std::vector<Label> y;

  Eigen::Index rows() const { return x.rows(); }
  Eigen::Index cols() const { return x.cols(); }
};

FeatureTable to_table(std::span<const LabeledExample> examples);
// Column subsets: H -> (H_Omega, H_S), I -> (I_C, I_S), H+I+E -> all five.
FeatureTable select_stream(const FeatureTable& full, StreamGroup g);
FeatureTable select_stream(std::span<const LabeledExample> examples, StreamGroup g);

struct SplitFractions {
  double train = 0.6;
  double validation = 0.2;
  double test = 0.2;
};

struct DatasetSplit {
  FeatureTable train;
  FeatureTable validation;
  FeatureTable test;
  Eigen::VectorXd mean;    // per column, from train
  Eigen::VectorXd stddev;  // per column, from train
};

// Stratified split with z-score normalization fitted on train. Missing
// values become 0 (the train mean) after normalization.
DatasetSplit split(const FeatureTable& table, const SplitFractions& fractions, std::uint64_t seed);

std::array<int, kNumClasses> class_counts(std::span<const Label> labels);

// Feature CSV: t, loa, H_S, H_Omega, I_C, I_S, E_d, label; missing values
// are empty cells.
std::string features_csv_header();
std::string features_csv_row(const LabeledExample& e);
std::vector<LabeledExample> read_features_csv(std::string_view text);

// Dense table CSV with a trailing label column.
std::string table_to_csv(const FeatureTable& t);
FeatureTable table_from_csv(std::string_view text);

}  // namespace loa

#endif  // LOA_DATASET_HPP_
