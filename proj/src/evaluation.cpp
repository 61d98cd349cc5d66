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

#include "loa/evaluation.hpp"

#include <charconv>
#include <numeric>

#include "loa/util.hpp"

namespace loa {

using nlohmann::json;

ConfusionMatrix confusion_matrix(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) throw Error("confusion_matrix: length mismatch");
  ConfusionMatrix cm = ConfusionMatrix::Zero();
  for (std::size_t i = 0; i < truth.size(); ++i) ++cm(index(truth[i]), index(predicted[i]));
  return cm;
}

namespace {

// Mean of count ratios kept as an exact fraction, so the result is the
// correctly rounded quotient. Falls back to floating point on overflow.
class RatioMean {
 public:
  void add(std::int64_t num, std::int64_t den) {
    ++n_;
    approx_ += static_cast<double>(num) / static_cast<double>(den);
    if (!exact_) return;
    std::int64_t a = 0, b = 0, d = 0;
    if (__builtin_mul_overflow(num_, den, &a) || __builtin_mul_overflow(num, den_, &b) ||
        __builtin_add_overflow(a, b, &a) || __builtin_mul_overflow(den_, den, &d)) {
      exact_ = false;
      return;
    }
    const std::int64_t g = std::gcd(a, d);
    num_ = g > 0 ? a / g : a;
    den_ = g > 0 ? d / g : d;
  }
  int count() const { return n_; }
  double value() const {
    constexpr std::int64_t kExact = std::int64_t{1} << 53;
    if (exact_ && num_ < kExact && den_ * n_ < kExact) {
      return static_cast<double>(num_) / static_cast<double>(den_ * n_);
    }
    return approx_ / n_;
  }

 private:
  std::int64_t num_ = 0, den_ = 1;
  int n_ = 0;
  double approx_ = 0.0;
  bool exact_ = true;
};

}  // namespace

double balanced_accuracy(const ConfusionMatrix& cm) {
  if ((cm.array() < 0).any()) throw Error("confusion matrix has negative counts");
  RatioMean mean;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto row = cm.row(c).sum();
    if (row == 0) continue;
    mean.add(cm(c, c), row);
  }
  if (mean.count() == 0) throw Error("balanced_accuracy: empty confusion matrix");
  return mean.value();
}

double macro_f1(const ConfusionMatrix& cm) {
  if ((cm.array() < 0).any()) throw Error("confusion matrix has negative counts");
  RatioMean mean;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto actual = cm.row(c).sum();
    const auto predicted = cm.col(c).sum();
    if (actual == 0 && predicted == 0) continue;
    // F1 = 2 tp / (actual + predicted), which is 0 whenever tp is 0.
    mean.add(2 * cm(c, c), actual + predicted);
  }
  if (mean.count() == 0) throw Error("macro_f1: empty confusion matrix");
  return mean.value();
}

double aggregate_balanced_accuracy(std::span<const LevelScore> per_loa) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& s : per_loa) {
    if (s.count <= 0) throw Error("aggregate_balanced_accuracy: counts must be positive");
    num += s.balanced_accuracy * static_cast<double>(s.count);
    den += static_cast<double>(s.count);
  }
  if (den == 0.0) throw Error("aggregate_balanced_accuracy: no levels");
  return num / den;
}

double chance_baseline(std::span<const ChanceInput> per_loa, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error("chance_baseline: trials must be positive");
  Rng rng(seed);
  double total = 0.0;
  std::vector<LevelScore> scores;
  std::vector<Label> pred;
  for (int t = 0; t < trials; ++t) {
    scores.clear();
    for (const auto& level : per_loa) {
      const auto n_train = level.train_counts[0] + level.train_counts[1] + level.train_counts[2];
      if (n_train <= 0 || level.test_labels.empty()) continue;
      pred.clear();
      for (std::size_t i = 0; i < level.test_labels.size(); ++i) {
        auto draw = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(n_train)));
        int k = 0;
        while (draw >= level.train_counts[static_cast<std::size_t>(k)]) draw -= level.train_counts[static_cast<std::size_t>(k++)];
        pred.push_back(static_cast<Label>(k));
      }
      scores.push_back({balanced_accuracy(confusion_matrix(level.test_labels, pred)), level.weight});
    }
    if (scores.empty()) throw Error("chance_baseline: no level has data");
    total += aggregate_balanced_accuracy(scores);
  }
  return total / trials;
}

namespace {

std::string fmt(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, r.ptr);
}

double reference_for(StreamGroup g) {
  switch (g) {
    case StreamGroup::H: return kReferenceH;
    case StreamGroup::I: return kReferenceI;
    case StreamGroup::HIE: return kReferenceHIE;
  }
  return 0.0;
}

json cm_to_json(const ConfusionMatrix& cm) {
  json rows = json::array();
  for (int r = 0; r < kNumClasses; ++r) rows.push_back({cm(r, 0), cm(r, 1), cm(r, 2)});
  return rows;
}

}  // namespace

json StreamReport::to_json() const {
  json cells_json = json::array();
  for (const auto& c : cells) {
    cells_json.push_back({{"loa", to_string(c.loa)},
                          {"stream", to_string(c.stream)},
                          {"best_learner", to_string(c.best)},
                          {"hp", c.hp.values},
                          {"validation_macro_f1", c.validation_macro_f1},
                          {"balanced_accuracy", c.balanced_accuracy},
                          {"macro_f1", c.macro_f1},
                          {"confusion", cm_to_json(c.confusion)},
                          {"train_count", c.train_count},
                          {"test_count", c.test_count}});
  }
  json agg = json::object();
  json ref = json::object();
  for (auto g : kAllStreams) {
    if (auto it = aggregate.find(g); it != aggregate.end()) agg[std::string(to_string(g))] = it->second;
    ref[std::string(to_string(g))] = reference_for(g);
  }
  ref["chance"] = kReferenceChance;
  return {{"format", "loa-stream-report"},
          {"version", 1},
          {"config_hash", config_hash},
          {"cells", cells_json},
          {"aggregate_balanced_accuracy", agg},
          {"chance", chance},
          {"chance_trials", chance_trials},
          {"reference", ref}};
}

std::string StreamReport::to_csv() const {
  std::string out = "row,stream,loa,learner,balanced_accuracy,macro_f1,reference\n";
  for (const auto& c : cells) {
    out += "cell," + std::string(to_string(c.stream)) + "," + std::string(to_string(c.loa)) + "," +
           std::string(to_string(c.best)) + "," + fmt(c.balanced_accuracy) + "," + fmt(c.macro_f1) + ",\n";
  }
  for (auto g : kAllStreams) {
    const auto it = aggregate.find(g);
    if (it == aggregate.end()) continue;
    out += "aggregate," + std::string(to_string(g)) + ",all,," + fmt(it->second) + ",," + fmt(reference_for(g)) + "\n";
  }
  out += "chance,,all,," + fmt(chance) + ",," + fmt(kReferenceChance) + "\n";
  return out;
}

std::vector<SelectedModel> select_models(const std::array<std::optional<DatasetSplit>, kNumLevels>& datasets,
                                         const ReportOptions& options) {
  if (options.learners.empty()) throw Error("report needs at least one learner kind");
  std::vector<SelectedModel> out;
  for (int l = 0; l < kNumLevels; ++l) {
    const auto& ds = datasets[static_cast<std::size_t>(l)];
    if (!ds) continue;
    for (auto g : kAllStreams) {
      const auto train = select_stream(ds->train, g);
      const auto validation = select_stream(ds->validation, g);
      std::optional<SelectedModel> best;
      for (auto kind : options.learners) {
        const auto it = options.grids.find(kind);
        auto grid = it != options.grids.end() ? it->second : default_grid(kind);
        for (auto& hp : grid) {
          if (!hp.values.count("seed") && (kind == LearnerKind::RandomForest || kind == LearnerKind::LinearSVM)) {
            hp.values["seed"] = static_cast<double>(options.seed % (std::uint64_t{1} << 52));
          }
        }
        auto r = grid_search(kind, grid, train, validation, options.parallel);
        double score = -1.0;
        for (const auto& p : r.points) {
          if (p.hp == r.best) {
            score = p.validation_macro_f1;
            break;
          }
        }
        if (!best || score > best->cell.validation_macro_f1) {
          SelectedModel s;
          s.cell.loa = static_cast<LoaLevel>(l);
          s.cell.stream = g;
          s.cell.best = kind;
          s.cell.hp = r.best;
          s.cell.validation_macro_f1 = score;
          s.model = std::move(r.model);
          s.model.loa = s.cell.loa;
          s.model.stream = g;
          best = std::move(s);
        }
      }
      best->cell.train_count = train.rows();
      out.push_back(std::move(*best));
    }
  }
  return out;
}

StreamReport report_from_selection(const std::array<std::optional<DatasetSplit>, kNumLevels>& datasets,
                                   const std::vector<SelectedModel>& selection, const ReportOptions& options) {
  StreamReport report;
  std::map<StreamGroup, std::vector<LevelScore>> per_stream;
  for (const auto& s : selection) {
    const auto& ds = datasets[static_cast<std::size_t>(index(s.cell.loa))];
    if (!ds) throw Error("selection refers to a level without data");
    const auto test = select_stream(ds->test, s.cell.stream);
    CellResult c = s.cell;
    c.train_count = ds->train.rows();
    c.test_count = test.rows();
    c.confusion = confusion_matrix(test.y, s.model.predict_all(test.x));
    c.balanced_accuracy = balanced_accuracy(c.confusion);
    c.macro_f1 = macro_f1(c.confusion);
    per_stream[c.stream].push_back({c.balanced_accuracy, c.train_count});
    report.cells.push_back(c);
  }
  for (const auto& [g, scores] : per_stream) report.aggregate[g] = aggregate_balanced_accuracy(scores);

  std::vector<ChanceInput> chance_in;
  for (const auto& ds : datasets) {
    if (!ds) continue;
    ChanceInput in;
    const auto counts = class_counts(ds->train.y);
    for (int k = 0; k < kNumClasses; ++k) in.train_counts[static_cast<std::size_t>(k)] = counts[static_cast<std::size_t>(k)];
    in.test_labels = ds->test.y;
    in.weight = ds->train.rows();
    chance_in.push_back(std::move(in));
  }
  report.chance_trials = options.chance_trials;
  if (!chance_in.empty()) {
    report.chance = chance_baseline(chance_in, options.chance_trials, derive_seed(options.seed, "chance"));
  }
  return report;
}

StreamReport stream_comparison_report(const std::array<std::optional<DatasetSplit>, kNumLevels>& datasets,
                                      const ReportOptions& options) {
  return report_from_selection(datasets, select_models(datasets, options), options);
}

}  // namespace loa
