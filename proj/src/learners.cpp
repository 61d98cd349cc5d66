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

#include "loa/learners.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <set>

#include <Eigen/Cholesky>

#include "loa/evaluation.hpp"
#include "loa/util.hpp"
#include "tree_impl.hpp"

namespace loa {

using nlohmann::json;

std::string_view to_string(LearnerKind k) {
  switch (k) {
    case LearnerKind::LogisticRegression: return "LogisticRegression";
    case LearnerKind::GaussianNaiveBayes: return "GaussianNaiveBayes";
    case LearnerKind::DecisionTree: return "DecisionTree";
    case LearnerKind::RandomForest: return "RandomForest";
    case LearnerKind::GradientBoosting: return "GradientBoosting";
    case LearnerKind::LinearSVM: return "LinearSVM";
  }
  return "?";
}

LearnerKind parse_learner(std::string_view s) {
  for (auto k : kAllLearners) {
    if (to_string(k) == s) return k;
  }
  throw Error("unknown learner '" + std::string(s) + "'");
}

double Hyperparameters::get(const std::string& name, double fallback) const {
  const auto it = values.find(name);
  return it == values.end() ? fallback : it->second;
}

int Hyperparameters::get_int(const std::string& name, int fallback) const {
  return static_cast<int>(std::lround(get(name, fallback)));
}

namespace {

struct Range {
  double lo;
  double hi;
  bool integer;
};

const std::map<std::string, Range>& schema(LearnerKind kind) {
  static const std::map<LearnerKind, std::map<std::string, Range>> table = {
      {LearnerKind::LogisticRegression, {{"lambda", {1e-12, 1e6, false}}, {"max_iter", {1, 10000, true}}}},
      {LearnerKind::GaussianNaiveBayes, {{"var_smoothing", {0.0, 1.0, false}}}},
      {LearnerKind::DecisionTree,
       {{"max_depth", {0, 64, true}}, {"min_samples_split", {2, 1e9, true}}, {"max_features", {1e-9, 1.0, false}}}},
      {LearnerKind::RandomForest,
       {{"n_trees", {1, 10000, true}},
        {"max_depth", {0, 64, true}},
        {"max_features", {0.0, 1.0, false}},
        {"bootstrap", {0, 1, true}}}},
      {LearnerKind::GradientBoosting,
       {{"n_rounds", {1, 10000, true}}, {"learning_rate", {1e-9, 10.0, false}}, {"max_depth", {1, 16, true}}}},
      {LearnerKind::LinearSVM, {{"C", {1e-9, 1e9, false}}, {"epochs", {1, 10000, true}}}},
  };
  return table.at(kind);
}

}  // namespace

void validate(LearnerKind kind, const Hyperparameters& hp) {
  const auto& s = schema(kind);
  for (const auto& [name, v] : hp.values) {
    Range r{};
    if (name == "class_weight") r = {0, 1, true};
    else if (name == "seed") r = {0, 9.007199254740992e15, true};
    else if (auto it = s.find(name); it != s.end()) r = it->second;
    else throw Error("hyperparameter '" + name + "' is not defined for " + std::string(to_string(kind)));
    if (!std::isfinite(v) || v < r.lo || v > r.hi || (r.integer && v != std::round(v))) {
      throw Error("hyperparameter '" + name + "' out of range for " + std::string(to_string(kind)));
    }
  }
}

Label argmax_label(const ClassScores& s) {
  int best = 0;
  for (int k = 1; k < kNumClasses; ++k) {
    if (s(k) > s(best)) best = k;
  }
  return static_cast<Label>(best);
}

Eigen::VectorXd sample_weights(const std::vector<Label>& y, bool balanced) {
  Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(y.size()));
  if (!balanced) return w;
  const auto counts = class_counts(y);
  const int present = static_cast<int>(std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }));
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double nc = counts[static_cast<std::size_t>(index(y[i]))];
    w(static_cast<Eigen::Index>(i)) = static_cast<double>(y.size()) / (present * nc);
  }
  return w;
}

namespace {

using detail::Tree;
using detail::TreeParams;

json vec_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vec_from_json(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json present_to_json(const std::array<bool, kNumClasses>& p) { return {p[0], p[1], p[2]}; }
std::array<bool, kNumClasses> present_from_json(const json& j) {
  return {j.at(0).get<bool>(), j.at(1).get<bool>(), j.at(2).get<bool>()};
}

std::array<bool, kNumClasses> present_classes(const std::vector<Label>& y) {
  const auto c = class_counts(y);
  return {c[0] > 0, c[1] > 0, c[2] > 0};
}

// Softmax over present classes; absent classes score 0.
ClassScores softmax_present(const Eigen::Vector3d& z, const std::array<bool, kNumClasses>& present) {
  double m = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < kNumClasses; ++k) {
    if (present[static_cast<std::size_t>(k)]) m = std::max(m, z(k));
  }
  ClassScores s = ClassScores::Zero();
  for (int k = 0; k < kNumClasses; ++k) {
    if (present[static_cast<std::size_t>(k)]) s(k) = std::exp(z(k) - m);
  }
  return s / s.sum();
}

double sigmoid(double z) { return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z)); }

// ---------------------------------------------------------------------------
// Logistic regression, one-vs-rest, Newton iterations with backtracking.

class LogisticRegression final : public Classifier {
 public:
  LogisticRegression(Eigen::MatrixXd coef, std::array<bool, kNumClasses> present)
      : coef_(std::move(coef)), present_(present) {}

  static LogisticRegression fit(const Eigen::MatrixXd& x, const std::vector<Label>& y, const Eigen::VectorXd& w,
                                double lambda, int max_iter) {
    const auto n = x.rows();
    const auto d = x.cols();
    Eigen::MatrixXd a(n, d + 1);
    a.col(0).setOnes();
    a.rightCols(d) = x;
    Eigen::VectorXd reg = Eigen::VectorXd::Constant(d + 1, lambda);
    reg(0) = 1e-10;

    const auto present = present_classes(y);
    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(kNumClasses, d + 1);
    for (int k = 0; k < kNumClasses; ++k) {
      if (!present[static_cast<std::size_t>(k)]) continue;
      Eigen::VectorXd t(n);
      for (Eigen::Index i = 0; i < n; ++i) t(i) = index(y[static_cast<std::size_t>(i)]) == k ? 1.0 : 0.0;

      auto objective = [&](const Eigen::VectorXd& b) {
        const Eigen::VectorXd z = a * b;
        double f = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          // log(1 + exp(z)) - t z, stable for large |z|
          const double zi = z(i);
          const double softplus = zi > 0 ? zi + std::log1p(std::exp(-zi)) : std::log1p(std::exp(zi));
          f += w(i) * (softplus - t(i) * zi);
        }
        return f + 0.5 * (reg.array() * b.array().square()).sum();
      };

      Eigen::VectorXd b = Eigen::VectorXd::Zero(d + 1);
      double f = objective(b);
      for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd z = a * b;
        Eigen::VectorXd p(n), h(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          p(i) = sigmoid(z(i));
          h(i) = w(i) * p(i) * (1.0 - p(i));
        }
        const Eigen::VectorXd g = a.transpose() * (w.array() * (p - t).array()).matrix() + reg.cwiseProduct(b);
        Eigen::MatrixXd hess = a.transpose() * h.asDiagonal() * a;
        hess.diagonal() += reg;
        const Eigen::VectorXd step = hess.ldlt().solve(g);
        double alpha = 1.0;
        Eigen::VectorXd next = b - step;
        double fn = objective(next);
        while (fn > f && alpha > 1e-8) {
          alpha *= 0.5;
          next = b - alpha * step;
          fn = objective(next);
        }
        if (fn > f) break;
        const double change = (next - b).cwiseAbs().maxCoeff();
        b = next;
        f = fn;
        if (change < 1e-10) break;
      }
      coef.row(k) = b.transpose();
    }
    return LogisticRegression(std::move(coef), present);
  }

  ClassScores scores(const Eigen::Ref<const Eigen::RowVectorXd>& row) const override {
    ClassScores s = ClassScores::Zero();
    for (int k = 0; k < kNumClasses; ++k) {
      if (!present_[static_cast<std::size_t>(k)]) continue;
      s(k) = sigmoid(coef_(k, 0) + coef_.row(k).tail(row.size()).dot(row));
    }
    const double total = s.sum();
    return total > 0.0 ? ClassScores(s / total) : s;
  }

  json parameters() const override {
    json rows = json::array();
    for (int k = 0; k < kNumClasses; ++k) rows.push_back(vec_to_json(coef_.row(k).transpose()));
    return {{"coef", rows}, {"present", present_to_json(present_)}};
  }

  static LogisticRegression from_json(const json& j) {
    const auto& rows = j.at("coef");
    const auto first = vec_from_json(rows.at(0));
    Eigen::MatrixXd coef(kNumClasses, first.size());
    for (int k = 0; k < kNumClasses; ++k) coef.row(k) = vec_from_json(rows.at(static_cast<std::size_t>(k))).transpose();
    return LogisticRegression(std::move(coef), present_from_json(j.at("present")));
  }

  int arity() const override { return static_cast<int>(coef_.cols()) - 1; }

 private:
  Eigen::MatrixXd coef_;  // per class: intercept, weights
  std::array<bool, kNumClasses> present_;
};

// ---------------------------------------------------------------------------
// Gaussian naive Bayes.

class GaussianNaiveBayes final : public Classifier {
 public:
  GaussianNaiveBayes(Eigen::MatrixXd mean, Eigen::MatrixXd var, Eigen::Vector3d log_prior,
                     std::array<bool, kNumClasses> present)
      : mean_(std::move(mean)), var_(std::move(var)), log_prior_(log_prior), present_(present) {}

  static GaussianNaiveBayes fit(const Eigen::MatrixXd& x, const std::vector<Label>& y, const Eigen::VectorXd& w,
                                double var_smoothing) {
    const auto d = x.cols();
    const auto present = present_classes(y);
    double largest = 0.0;
    for (Eigen::Index c = 0; c < d; ++c) {
      const double m = x.col(c).mean();
      largest = std::max(largest, (x.col(c).array() - m).square().mean());
    }
    const double eps = std::max(var_smoothing * largest, 1e-300);

    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(kNumClasses, d);
    Eigen::MatrixXd var = Eigen::MatrixXd::Ones(kNumClasses, d);
    Eigen::Vector3d wc = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < y.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      wc(index(y[i])) += w(r);
      mean.row(index(y[i])) += w(r) * x.row(r);
    }
    for (int k = 0; k < kNumClasses; ++k) {
      if (present[static_cast<std::size_t>(k)]) mean.row(k) /= wc(k);
    }
    Eigen::MatrixXd ss = Eigen::MatrixXd::Zero(kNumClasses, d);
    for (std::size_t i = 0; i < y.size(); ++i) {
      const auto r = static_cast<Eigen::Index>(i);
      const int k = index(y[i]);
      ss.row(k) += w(r) * (x.row(r) - mean.row(k)).array().square().matrix();
    }
    Eigen::Vector3d log_prior = Eigen::Vector3d::Zero();
    for (int k = 0; k < kNumClasses; ++k) {
      if (!present[static_cast<std::size_t>(k)]) continue;
      var.row(k) = (ss.row(k) / wc(k)).array() + eps;
      log_prior(k) = std::log(wc(k) / wc.sum());
    }
    return GaussianNaiveBayes(std::move(mean), std::move(var), log_prior, present);
  }

  ClassScores scores(const Eigen::Ref<const Eigen::RowVectorXd>& row) const override {
    Eigen::Vector3d z = Eigen::Vector3d::Zero();
    for (int k = 0; k < kNumClasses; ++k) {
      if (!present_[static_cast<std::size_t>(k)]) continue;
      const auto v = var_.row(k).array();
      z(k) = log_prior_(k) - 0.5 * ((2.0 * std::numbers::pi * v).log() +
                                    (row.array() - mean_.row(k).array()).square() / v)
                                       .sum();
    }
    return softmax_present(z, present_);
  }

  json parameters() const override {
    json m = json::array(), v = json::array();
    for (int k = 0; k < kNumClasses; ++k) {
      m.push_back(vec_to_json(mean_.row(k).transpose()));
      v.push_back(vec_to_json(var_.row(k).transpose()));
    }
    return {{"mean", m}, {"var", v}, {"log_prior", vec_to_json(log_prior_)}, {"present", present_to_json(present_)}};
  }

  static GaussianNaiveBayes from_json(const json& j) {
    const auto d = vec_from_json(j.at("mean").at(0)).size();
    Eigen::MatrixXd m(kNumClasses, d), v(kNumClasses, d);
    for (int k = 0; k < kNumClasses; ++k) {
      m.row(k) = vec_from_json(j.at("mean").at(static_cast<std::size_t>(k))).transpose();
      v.row(k) = vec_from_json(j.at("var").at(static_cast<std::size_t>(k))).transpose();
    }
    return GaussianNaiveBayes(std::move(m), std::move(v), vec_from_json(j.at("log_prior")),
                              present_from_json(j.at("present")));
  }

  int arity() const override { return static_cast<int>(mean_.cols()); }

 private:
  Eigen::MatrixXd mean_;
  Eigen::MatrixXd var_;
  Eigen::Vector3d log_prior_;
  std::array<bool, kNumClasses> present_;
};

// ---------------------------------------------------------------------------
// Decision tree and random forest share the tree seed stream: tree k draws
// from derive_seed(seed, "tree:k").

std::vector<int> labels_as_int(const std::vector<Label>& y) {
  std::vector<int> out;
  out.reserve(y.size());
  for (auto l : y) out.push_back(index(l));
  return out;
}

class Forest final : public Classifier {
 public:
  Forest(std::vector<Tree> trees, int arity) : trees_(std::move(trees)), arity_(arity) {}

  static Forest fit(const Eigen::MatrixXd& x, const std::vector<Label>& y, const Eigen::VectorXd& w, int n_trees,
                    const TreeParams& params, bool bootstrap, std::uint64_t seed) {
    const auto yi = labels_as_int(y);
    const auto n = static_cast<int>(x.rows());
    std::vector<Tree> trees;
    for (int k = 0; k < n_trees; ++k) {
      Rng rng(derive_seed(seed, "tree:" + std::to_string(k)));
      std::vector<int> rows(static_cast<std::size_t>(n));
      if (bootstrap) {
        for (auto& r : rows) r = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        std::sort(rows.begin(), rows.end());
      } else {
        std::iota(rows.begin(), rows.end(), 0);
      }
      trees.push_back(detail::grow_classification_tree(x, yi, w, rows, params, rng));
    }
    return Forest(std::move(trees), static_cast<int>(x.cols()));
  }

  ClassScores scores(const Eigen::Ref<const Eigen::RowVectorXd>& row) const override {
    ClassScores s = ClassScores::Zero();
    for (const auto& t : trees_) s += t.leaf(row);
    return s / static_cast<double>(trees_.size());
  }

  json parameters() const override {
    json trees = json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return {{"trees", trees}, {"arity", arity_}};
  }

  static Forest from_json(const json& j) {
    std::vector<Tree> trees;
    for (const auto& t : j.at("trees")) trees.push_back(Tree::from_json(t));
    if (trees.empty()) throw Error("forest JSON has no trees");
    return Forest(std::move(trees), j.at("arity").get<int>());
  }

  int arity() const override { return arity_; }
  const std::vector<Tree>& trees() const { return trees_; }

 private:
  std::vector<Tree> trees_;
  int arity_;
};

int resolve_max_features(double fraction, int d) {
  if (fraction <= 0.0) return static_cast<int>(std::ceil(std::sqrt(static_cast<double>(d))));
  return std::clamp(static_cast<int>(std::ceil(fraction * d - 1e-9)), 1, d);
}

// ---------------------------------------------------------------------------
// Gradient boosting on softmax cross-entropy with Newton leaf values.

class GradientBoosting final : public Classifier {
 public:
  GradientBoosting(Eigen::Vector3d init, double lr, std::vector<std::array<std::optional<Tree>, kNumClasses>> rounds,
                   std::array<bool, kNumClasses> present, int arity)
      : init_(init), lr_(lr), rounds_(std::move(rounds)), present_(present), arity_(arity) {}

  static GradientBoosting fit(const Eigen::MatrixXd& x, const std::vector<Label>& y, const Eigen::VectorXd& w,
                              int n_rounds, double lr, int max_depth) {
    const auto n = x.rows();
    const auto present = present_classes(y);
    const int k_present = static_cast<int>(std::count(present.begin(), present.end(), true));
    const double newton_scale = (k_present - 1.0) / k_present;

    Eigen::Vector3d wc = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < y.size(); ++i) wc(index(y[i])) += w(static_cast<Eigen::Index>(i));
    Eigen::Vector3d init = Eigen::Vector3d::Zero();
    for (int k = 0; k < kNumClasses; ++k) {
      if (present[static_cast<std::size_t>(k)]) init(k) = std::log(wc(k) / wc.sum());
    }

    Eigen::MatrixXd f(n, kNumClasses);
    for (Eigen::Index i = 0; i < n; ++i) f.row(i) = init.transpose();
    std::vector<int> all(static_cast<std::size_t>(n));
    std::iota(all.begin(), all.end(), 0);
    const TreeParams params{max_depth, 2, 0};

    std::vector<std::array<std::optional<Tree>, kNumClasses>> rounds;
    Eigen::MatrixXd p(n, kNumClasses);
    for (int m = 0; m < n_rounds; ++m) {
      for (Eigen::Index i = 0; i < n; ++i) p.row(i) = softmax_present(f.row(i).transpose(), present).transpose();
      std::array<std::optional<Tree>, kNumClasses> round;
      for (int k = 0; k < kNumClasses; ++k) {
        if (!present[static_cast<std::size_t>(k)]) continue;
        Eigen::VectorXd r(n);
        for (Eigen::Index i = 0; i < n; ++i) r(i) = (index(y[static_cast<std::size_t>(i)]) == k ? 1.0 : 0.0) - p(i, k);
        auto leaf_value = [&](const std::vector<int>& rows) {
          double num = 0.0, den = 0.0;
          for (int row : rows) {
            num += w(row) * r(row);
            den += w(row) * std::abs(r(row)) * (1.0 - std::abs(r(row)));
          }
          return den > 1e-12 ? newton_scale * num / den : 0.0;
        };
        Tree t = detail::grow_regression_tree(x, r, w, all, params, leaf_value);
        for (Eigen::Index i = 0; i < n; ++i) f(i, k) += lr * t.leaf(x.row(i))(0);
        round[static_cast<std::size_t>(k)] = std::move(t);
      }
      rounds.push_back(std::move(round));
    }
    return GradientBoosting(init, lr, std::move(rounds), present, static_cast<int>(x.cols()));
  }

  ClassScores scores_at(const Eigen::Ref<const Eigen::RowVectorXd>& row, int n_rounds) const {
    Eigen::Vector3d f = init_;
    const auto used = std::min<std::size_t>(rounds_.size(), static_cast<std::size_t>(std::max(n_rounds, 0)));
    for (std::size_t m = 0; m < used; ++m) {
      for (int k = 0; k < kNumClasses; ++k) {
        const auto& t = rounds_[m][static_cast<std::size_t>(k)];
        if (t) f(k) += lr_ * t->leaf(row)(0);
      }
    }
    return softmax_present(f, present_);
  }

  ClassScores scores(const Eigen::Ref<const Eigen::RowVectorXd>& row) const override {
    return scores_at(row, static_cast<int>(rounds_.size()));
  }

  json parameters() const override {
    json rounds = json::array();
    for (const auto& r : rounds_) {
      json per = json::array();
      for (const auto& t : r) per.push_back(t ? t->to_json() : json(nullptr));
      rounds.push_back(per);
    }
    return {{"init", vec_to_json(init_)},
            {"learning_rate", lr_},
            {"rounds", rounds},
            {"present", present_to_json(present_)},
            {"arity", arity_}};
  }

  static GradientBoosting from_json(const json& j) {
    std::vector<std::array<std::optional<Tree>, kNumClasses>> rounds;
    for (const auto& r : j.at("rounds")) {
      std::array<std::optional<Tree>, kNumClasses> per;
      for (std::size_t k = 0; k < per.size(); ++k) {
        if (!r.at(k).is_null()) per[k] = Tree::from_json(r.at(k));
      }
      rounds.push_back(std::move(per));
    }
    return GradientBoosting(vec_from_json(j.at("init")), j.at("learning_rate").get<double>(), std::move(rounds),
                            present_from_json(j.at("present")), j.at("arity").get<int>());
  }

  int arity() const override { return arity_; }

 private:
  Eigen::Vector3d init_;
  double lr_;
  std::vector<std::array<std::optional<Tree>, kNumClasses>> rounds_;
  std::array<bool, kNumClasses> present_;
  int arity_;
};

// ---------------------------------------------------------------------------
// Linear SVM, one-vs-rest hinge loss, averaged stochastic subgradient with
// step 1 / (lambda t) and lambda = 1 / (C n).

class LinearSVM final : public Classifier {
 public:
  LinearSVM(Eigen::MatrixXd coef, std::array<bool, kNumClasses> present) : coef_(std::move(coef)), present_(present) {}

  static LinearSVM fit(const Eigen::MatrixXd& x, const std::vector<Label>& y, const Eigen::VectorXd& w, double c,
                       int epochs, std::uint64_t seed) {
    const auto n = x.rows();
    const auto d = x.cols();
    Eigen::MatrixXd a(n, d + 1);
    a.col(0).setOnes();
    a.rightCols(d) = x;
    const double lambda = 1.0 / (c * static_cast<double>(n));
    const auto total = static_cast<std::int64_t>(epochs) * n;
    const std::int64_t average_from = total / 2;

    const auto present = present_classes(y);
    Eigen::MatrixXd coef = Eigen::MatrixXd::Zero(kNumClasses, d + 1);
    for (int k = 0; k < kNumClasses; ++k) {
      if (!present[static_cast<std::size_t>(k)]) continue;
      Rng rng(derive_seed(seed, "svm:" + std::to_string(k)));
      Eigen::VectorXd b = Eigen::VectorXd::Zero(d + 1);
      Eigen::VectorXd avg = Eigen::VectorXd::Zero(d + 1);
      std::int64_t averaged = 0;
      for (std::int64_t t = 1; t <= total; ++t) {
        const auto i = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        const double yi = index(y[static_cast<std::size_t>(i)]) == k ? 1.0 : -1.0;
        const double eta = 1.0 / (lambda * static_cast<double>(t));
        const double margin = yi * a.row(i).dot(b);
        b *= 1.0 - eta * lambda;
        if (margin < 1.0) b += eta * w(i) * yi * a.row(i).transpose();
        if (t > average_from) {
          avg += b;
          ++averaged;
        }
      }
      coef.row(k) = (avg / static_cast<double>(averaged)).transpose();
    }
    return LinearSVM(std::move(coef), present);
  }

  ClassScores scores(const Eigen::Ref<const Eigen::RowVectorXd>& row) const override {
    Eigen::Vector3d z = Eigen::Vector3d::Zero();
    for (int k = 0; k < kNumClasses; ++k) z(k) = coef_(k, 0) + coef_.row(k).tail(row.size()).dot(row);
    return softmax_present(z, present_);
  }

  json parameters() const override {
    json rows = json::array();
    for (int k = 0; k < kNumClasses; ++k) rows.push_back(vec_to_json(coef_.row(k).transpose()));
    return {{"coef", rows}, {"present", present_to_json(present_)}};
  }

  static LinearSVM from_json(const json& j) {
    const auto& rows = j.at("coef");
    const auto first = vec_from_json(rows.at(0));
    Eigen::MatrixXd coef(kNumClasses, first.size());
    for (int k = 0; k < kNumClasses; ++k) coef.row(k) = vec_from_json(rows.at(static_cast<std::size_t>(k))).transpose();
    return LinearSVM(std::move(coef), present_from_json(j.at("present")));
  }

  int arity() const override { return static_cast<int>(coef_.cols()) - 1; }

 private:
  Eigen::MatrixXd coef_;
  std::array<bool, kNumClasses> present_;
};

}  // namespace

ClassScores TrainedModel::scores(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  if (!impl) throw Error("model is empty");
  if (row.size() != impl->arity()) {
    throw Error("feature row has " + std::to_string(row.size()) + " columns, model expects " +
                std::to_string(impl->arity()));
  }
  return impl->scores(row);
}

Label TrainedModel::predict(const Eigen::Ref<const Eigen::RowVectorXd>& row) const { return argmax_label(scores(row)); }

std::vector<Label> TrainedModel::predict_all(const Eigen::MatrixXd& x) const {
  std::vector<Label> out;
  out.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.push_back(predict(x.row(i)));
  return out;
}

TrainedModel fit(LearnerKind kind, const Hyperparameters& hp, const FeatureTable& train) {
  validate(kind, hp);
  if (train.rows() == 0 || train.cols() == 0) throw Error("fit: empty training table");
  if (static_cast<std::size_t>(train.rows()) != train.y.size()) throw Error("fit: label count mismatch");
  if (!train.x.allFinite()) throw Error("fit: features must be finite");
  const auto counts = class_counts(train.y);
  if (std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; }) < 2) {
    throw Error("fit: training set has a single class");
  }

  const auto w = sample_weights(train.y, hp.get_int("class_weight", 0) == 1);
  const auto seed = static_cast<std::uint64_t>(hp.get("seed", 0));
  const int d = static_cast<int>(train.cols());

  TrainedModel m;
  m.kind = kind;
  m.hp = hp;
  switch (kind) {
    case LearnerKind::LogisticRegression:
      m.impl = std::make_shared<LogisticRegression>(
          LogisticRegression::fit(train.x, train.y, w, hp.get("lambda", 1.0), hp.get_int("max_iter", 100)));
      break;
    case LearnerKind::GaussianNaiveBayes:
      m.impl = std::make_shared<GaussianNaiveBayes>(
          GaussianNaiveBayes::fit(train.x, train.y, w, hp.get("var_smoothing", 1e-9)));
      break;
    case LearnerKind::DecisionTree: {
      const TreeParams p{hp.get_int("max_depth", 0), hp.get_int("min_samples_split", 2),
                         resolve_max_features(hp.get("max_features", 1.0), d)};
      m.impl = std::make_shared<Forest>(Forest::fit(train.x, train.y, w, 1, p, false, seed));
      break;
    }
    case LearnerKind::RandomForest: {
      const TreeParams p{hp.get_int("max_depth", 0), 2, resolve_max_features(hp.get("max_features", 0.0), d)};
      m.impl = std::make_shared<Forest>(
          Forest::fit(train.x, train.y, w, hp.get_int("n_trees", 10), p, hp.get_int("bootstrap", 1) == 1, seed));
      break;
    }
    case LearnerKind::GradientBoosting:
      m.impl = std::make_shared<GradientBoosting>(GradientBoosting::fit(
          train.x, train.y, w, hp.get_int("n_rounds", 50), hp.get("learning_rate", 0.1), hp.get_int("max_depth", 3)));
      break;
    case LearnerKind::LinearSVM:
      m.impl = std::make_shared<LinearSVM>(
          LinearSVM::fit(train.x, train.y, w, hp.get("C", 1.0), hp.get_int("epochs", 20), seed));
      break;
  }
  return m;
}

std::vector<Label> predict_staged(const TrainedModel& model, const Eigen::MatrixXd& x, int rounds) {
  const auto* gb = dynamic_cast<const GradientBoosting*>(model.impl.get());
  if (!gb) return model.predict_all(x);
  if (x.cols() != gb->arity()) throw Error("feature arity mismatch");
  std::vector<Label> out;
  for (Eigen::Index i = 0; i < x.rows(); ++i) out.push_back(argmax_label(gb->scores_at(x.row(i), rounds)));
  return out;
}

GridSearchResult grid_search(LearnerKind kind, const std::vector<Hyperparameters>& grid, const FeatureTable& train,
                             const FeatureTable& validation, bool parallel) {
  if (grid.empty()) throw Error("grid_search: empty grid");
  struct Outcome {
    std::optional<TrainedModel> model;
    double score = -1.0;
    std::string error;
  };
  auto run = [&](const Hyperparameters& hp) {
    Outcome o;
    try {
      o.model = fit(kind, hp, train);
      const auto pred = o.model->predict_all(validation.x);
      o.score = macro_f1(confusion_matrix(validation.y, pred));
    } catch (const Error& e) {
      o.model.reset();
      o.error = e.what();
    }
    return o;
  };

  std::vector<Outcome> outcomes;
  if (parallel) {
    std::vector<std::future<Outcome>> futures;
    for (const auto& hp : grid) futures.push_back(std::async(std::launch::async, run, std::cref(hp)));
    for (auto& f : futures) outcomes.push_back(f.get());
  } else {
    for (const auto& hp : grid) outcomes.push_back(run(hp));
  }

  GridSearchResult result;
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    result.points.push_back({grid[i], outcomes[i].score});
    if (outcomes[i].model && (!best || outcomes[i].score > outcomes[*best].score)) best = i;
  }
  if (!best) throw Error("grid_search: every fit failed for " + std::string(to_string(kind)) + ": " + outcomes[0].error);
  result.best = grid[*best];
  result.model = std::move(*outcomes[*best].model);
  return result;
}

std::vector<Hyperparameters> default_grid(LearnerKind kind) {
  std::vector<Hyperparameters> g;
  switch (kind) {
    case LearnerKind::LogisticRegression:
      for (double l : {0.01, 0.1, 1.0}) g.push_back({{{"lambda", l}}});
      break;
    case LearnerKind::GaussianNaiveBayes:
      g.push_back({{{"var_smoothing", 1e-9}}});
      break;
    case LearnerKind::DecisionTree:
      for (double depth : {2.0, 4.0, 8.0}) g.push_back({{{"max_depth", depth}}});
      break;
    case LearnerKind::RandomForest:
      for (double trees : {10.0, 50.0}) {
        for (double depth : {2.0, 4.0, 8.0}) g.push_back({{{"n_trees", trees}, {"max_depth", depth}}});
      }
      break;
    case LearnerKind::GradientBoosting:
      for (double rounds : {50.0, 100.0}) {
        for (double lr : {0.1, 0.3}) g.push_back({{{"n_rounds", rounds}, {"learning_rate", lr}}});
      }
      break;
    case LearnerKind::LinearSVM:
      for (double c : {0.1, 1.0, 10.0}) g.push_back({{{"C", c}}});
      break;
  }
  return g;
}

json model_to_json(const TrainedModel& m) {
  if (!m.impl) throw Error("cannot serialize an empty model");
  return {{"format", "loa-model"},
          {"version", 1},
          {"kind", to_string(m.kind)},
          {"hp", m.hp.values},
          {"loa", to_string(m.loa)},
          {"stream", to_string(m.stream)},
          {"train_hash", m.train_hash},
          {"arity", m.impl->arity()},
          {"params", m.impl->parameters()}};
}

TrainedModel model_from_json(const json& j) {
  if (j.at("format") != "loa-model") throw Error("not a model document");
  if (j.at("version").get<int>() != 1) throw Error("unsupported model version");
  TrainedModel m;
  m.kind = parse_learner(j.at("kind").get<std::string>());
  m.hp.values = j.at("hp").get<std::map<std::string, double>>();
  m.loa = parse_level(j.at("loa").get<std::string>());
  m.stream = parse_stream(j.at("stream").get<std::string>());
  m.train_hash = j.at("train_hash").get<std::string>();
  const auto& p = j.at("params");
  switch (m.kind) {
    case LearnerKind::LogisticRegression:
      m.impl = std::make_shared<LogisticRegression>(LogisticRegression::from_json(p));
      break;
    case LearnerKind::GaussianNaiveBayes:
      m.impl = std::make_shared<GaussianNaiveBayes>(GaussianNaiveBayes::from_json(p));
      break;
    case LearnerKind::DecisionTree:
    case LearnerKind::RandomForest:
      m.impl = std::make_shared<Forest>(Forest::from_json(p));
      break;
    case LearnerKind::GradientBoosting:
      m.impl = std::make_shared<GradientBoosting>(GradientBoosting::from_json(p));
      break;
    case LearnerKind::LinearSVM:
      m.impl = std::make_shared<LinearSVM>(LinearSVM::from_json(p));
      break;
  }
  if (m.impl->arity() != j.at("arity").get<int>()) throw Error("model arity does not match its parameters");
  return m;
}

}  // namespace loa
