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

// Classical three-class learners written against Eigen, and a validation
// grid search scored by macro-F1.
//
// Every learner produces a score per class; prediction is the argmax with
// ties going to the lowest class index. Classes absent from the training set
// score 0.
//
// Hyperparameter schema (name: meaning, default):
//   all kinds        class_weight: 0 = none, 1 = balanced             (0)
//                    seed: random stream for stochastic kinds          (0)
//   LogisticRegression  lambda: L2 strength                            (1.0)
//                       max_iter                                       (100)
//   GaussianNaiveBayes  var_smoothing: added to each variance as a
//                       fraction of the largest feature variance       (1e-9)
//   DecisionTree        max_depth: 0 = unlimited                       (0)
//                       min_samples_split                              (2)
//                       max_features: fraction of columns per split    (1.0)
//   RandomForest        n_trees                                        (10)
//                       max_depth                                      (0)
//                       max_features: fraction, 0 = ceil(sqrt(d))      (0)
//                       bootstrap: 0 or 1                              (1)
//   GradientBoosting    n_rounds                                       (50)
//                       learning_rate                                  (0.1)
//                       max_depth                                      (3)
//   LinearSVM           C                                              (1.0)
//                       epochs                                         (20)

#ifndef LOA_LEARNERS_HPP_
#define LOA_LEARNERS_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "loa/dataset.hpp"

namespace loa {

enum class LearnerKind { LogisticRegression, GaussianNaiveBayes, DecisionTree, RandomForest, GradientBoosting, LinearSVM };
inline constexpr std::array<LearnerKind, 6> kAllLearners = {
    LearnerKind::LogisticRegression, LearnerKind::GaussianNaiveBayes, LearnerKind::DecisionTree,
    LearnerKind::RandomForest,       LearnerKind::GradientBoosting,   LearnerKind::LinearSVM};

std::string_view to_string(LearnerKind k);
LearnerKind parse_learner(std::string_view s);

struct Hyperparameters {
  std::map<std::string, double> values;

  double get(const std::string& name, double fallback) const;
  int get_int(const std::string& name, int fallback) const;
  friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

// Rejects unknown names and out-of-range values for the kind.
void validate(LearnerKind kind, const Hyperparameters& hp);

using ClassScores = Eigen::Vector3d;

class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual ClassScores scores(const Eigen::Ref<const Eigen::RowVectorXd>& row) const = 0;
  virtual nlohmann::json parameters() const = 0;
  virtual int arity() const = 0;
};

struct TrainedModel {
  LearnerKind kind = LearnerKind::DecisionTree;
  Hyperparameters hp;
  std::shared_ptr<const Classifier> impl;
  LoaLevel loa = LoaLevel::A0;
  StreamGroup stream = StreamGroup::HIE;
  std::string train_hash;

  ClassScores scores(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  Label predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  std::vector<Label> predict_all(const Eigen::MatrixXd& x) const;
};

// Argmax, lowest index on ties.
Label argmax_label(const ClassScores& s);

// Per-example weights for the class-weight mode: n / (k * n_c) over the k
// present classes, or all ones when the mode is off.
Eigen::VectorXd sample_weights(const std::vector<Label>& y, bool balanced);

TrainedModel fit(LearnerKind kind, const Hyperparameters& hp, const FeatureTable& train);

// Predictions of a boosting model truncated to its first `rounds` rounds.
// Other kinds ignore `rounds`.
std::vector<Label> predict_staged(const TrainedModel& model, const Eigen::MatrixXd& x, int rounds);

struct GridPoint {
  Hyperparameters hp;
  double validation_macro_f1 = 0.0;
};

struct GridSearchResult {
  Hyperparameters best;
  TrainedModel model;
  std::vector<GridPoint> points;  // in grid order
};

// Fits every grid point on train and keeps the best validation macro-F1,
// first in grid order on ties. Grid points are fitted concurrently when
// `parallel` is set; the result does not depend on it.
GridSearchResult grid_search(LearnerKind kind, const std::vector<Hyperparameters>& grid, const FeatureTable& train,
                             const FeatureTable& validation, bool parallel = false);

// Desk-scale default grid for each kind, in documented order.
std::vector<Hyperparameters> default_grid(LearnerKind kind);

// Versioned model JSON: {format, version, kind, hp, loa, stream, train_hash,
// arity, params}.
nlohmann::json model_to_json(const TrainedModel& m);
TrainedModel model_from_json(const nlohmann::json& j);

}  // namespace loa

#endif  // LOA_LEARNERS_HPP_
