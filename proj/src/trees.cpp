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

#include <algorithm>
#include <numeric>

#include "loa/types.hpp"
#include "tree_impl.hpp"

namespace loa::detail {

const Eigen::Vector3d& Tree::leaf(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
  int i = 0;
  while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    i = row(n.feature) <= n.threshold ? n.left : n.right;
  }
  return nodes[static_cast<std::size_t>(i)].value;
}

int Tree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int best = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    best = std::max(best, d[i]);
    if (nodes[i].feature >= 0) {
      d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
      d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
    }
  }
  return best;
}

nlohmann::json Tree::to_json() const {
  nlohmann::json feature = nlohmann::json::array(), threshold = nlohmann::json::array(),
                 left = nlohmann::json::array(), right = nlohmann::json::array(), value = nlohmann::json::array();
  for (const auto& n : nodes) {
    feature.push_back(n.feature);
    threshold.push_back(n.threshold);
    left.push_back(n.left);
    right.push_back(n.right);
    value.push_back({n.value(0), n.value(1), n.value(2)});
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

Tree Tree::from_json(const nlohmann::json& j) {
  Tree t;
  const auto& f = j.at("feature");
  t.nodes.resize(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    auto& n = t.nodes[i];
    n.feature = f[i].get<int>();
    n.threshold = j.at("threshold")[i].get<double>();
    n.left = j.at("left")[i].get<int>();
    n.right = j.at("right")[i].get<int>();
    const auto& v = j.at("value")[i];
    n.value = Eigen::Vector3d(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
  }
  for (const auto& n : t.nodes) {
    if (n.feature >= 0 && (n.left <= 0 || n.right <= 0 || n.left >= static_cast<int>(t.nodes.size()) ||
                           n.right >= static_cast<int>(t.nodes.size()))) {
      throw Error("tree JSON has a dangling child index");
    }
  }
  if (t.nodes.empty()) throw Error("tree JSON has no nodes");
  return t;
}

namespace {

struct Split {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;
};

double midpoint(double a, double b) {
  const double m = a + (b - a) / 2.0;
  return m < b ? m : a;
}

std::vector<int> candidate_features(int d, int max_features, Rng& rng) {
  std::vector<int> f(static_cast<std::size_t>(d));
  std::iota(f.begin(), f.end(), 0);
  if (max_features <= 0 || max_features >= d) return f;
  for (int i = 0; i < max_features; ++i) {
    const auto j = static_cast<std::size_t>(i) + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(d - i)));
    std::swap(f[static_cast<std::size_t>(i)], f[j]);
  }
  f.resize(static_cast<std::size_t>(max_features));
  std::sort(f.begin(), f.end());
  return f;
}

std::vector<int> sorted_by(const Eigen::MatrixXd& x, const std::vector<int>& rows, int feature) {
  std::vector<int> s = rows;
  std::stable_sort(s.begin(), s.end(), [&](int a, int b) { return x(a, feature) < x(b, feature); });
  return s;
}

// Generic best-split search. `Stats` accumulates per-row contributions and
// scores a (left, right) pair; higher is better.
template <class Stats>
Split best_split(const Eigen::MatrixXd& x, const std::vector<int>& rows, const std::vector<int>& features,
                 const Stats& total) {
  Split best;
  bool found = false;
  for (int f : features) {
    const auto s = sorted_by(x, rows, f);
    Stats left = total.empty();
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      left.add(s[i]);
      const double a = x(s[i], f);
      const double b = x(s[i + 1], f);
      if (!(a < b)) continue;
      const Stats right = total.minus(left);
      if (!(left.weight() > 0.0 && right.weight() > 0.0)) continue;
      const double score = left.score() + right.score();
      if (!found || score > best.score) {
        best = {f, midpoint(a, b), score};
        found = true;
      }
    }
  }
  return best;
}

struct ClassStats {
  const std::vector<int>* y = nullptr;
  const Eigen::VectorXd* w = nullptr;
  Eigen::Vector3d c = Eigen::Vector3d::Zero();

  ClassStats empty() const { return {y, w, Eigen::Vector3d::Zero()}; }
  void add(int r) { c((*y)[static_cast<std::size_t>(r)]) += (*w)(r); }
  ClassStats minus(const ClassStats& o) const { return {y, w, c - o.c}; }
  double weight() const { return c.sum(); }
  // Gini decrease up to a constant: sum_c n_c^2 / n.
  double score() const { return c.squaredNorm() / c.sum(); }
};

struct RegStats {
  const Eigen::VectorXd* t = nullptr;
  const Eigen::VectorXd* w = nullptr;
  double sw = 0.0;
  double swt = 0.0;

  RegStats empty() const { return {t, w, 0.0, 0.0}; }
  void add(int r) {
    sw += (*w)(r);
    swt += (*w)(r) * (*t)(r);
  }
  RegStats minus(const RegStats& o) const { return {t, w, sw - o.sw, swt - o.swt}; }
  double weight() const { return sw; }
  double score() const { return swt * swt / sw; }
};

template <class Stats, class MakeLeaf, class IsPure>
int grow(Tree& tree, const Eigen::MatrixXd& x, const std::vector<int>& rows, int depth, const TreeParams& p,
         Rng* rng, const Stats& proto, const MakeLeaf& make_leaf, const IsPure& is_pure) {
  const int id = static_cast<int>(tree.nodes.size());
  tree.nodes.emplace_back();
  tree.nodes.back().value = make_leaf(rows);

  const bool depth_ok = p.max_depth <= 0 || depth < p.max_depth;
  if (!depth_ok || static_cast<int>(rows.size()) < p.min_samples_split || is_pure(rows)) return id;

  Stats total = proto.empty();
  for (int r : rows) total.add(r);
  Rng dummy(0);
  const auto features = candidate_features(static_cast<int>(x.cols()), p.max_features, rng ? *rng : dummy);
  const Split s = best_split(x, rows, features, total);
  if (s.feature < 0) return id;

  std::vector<int> lrows, rrows;
  for (int r : rows) (x(r, s.feature) <= s.threshold ? lrows : rrows).push_back(r);
  const int l = grow(tree, x, lrows, depth + 1, p, rng, proto, make_leaf, is_pure);
  const int rr = grow(tree, x, rrows, depth + 1, p, rng, proto, make_leaf, is_pure);
  auto& n = tree.nodes[static_cast<std::size_t>(id)];
  n.feature = s.feature;
  n.threshold = s.threshold;
  n.left = l;
  n.right = rr;
  return id;
}

}  // namespace

Tree grow_classification_tree(const Eigen::MatrixXd& x, const std::vector<int>& y, const Eigen::VectorXd& w,
                              const std::vector<int>& rows, const TreeParams& params, Rng& rng) {
  if (rows.empty()) throw Error("cannot grow a tree on zero rows");
  const ClassStats proto{&y, &w, Eigen::Vector3d::Zero()};
  auto distribution = [&](const std::vector<int>& rs) {
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (int r : rs) c(y[static_cast<std::size_t>(r)]) += w(r);
    return Eigen::Vector3d(c / c.sum());
  };
  auto pure = [&](const std::vector<int>& rs) {
    const int first = y[static_cast<std::size_t>(rs.front())];
    return std::all_of(rs.begin(), rs.end(), [&](int r) { return y[static_cast<std::size_t>(r)] == first; });
  };
  Tree t;
  grow(t, x, rows, 0, params, &rng, proto, distribution, pure);
  return t;
}

Tree grow_regression_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, const Eigen::VectorXd& w,
                          const std::vector<int>& rows, const TreeParams& params, const LeafValueFn& leaf_value) {
  if (rows.empty()) throw Error("cannot grow a tree on zero rows");
  const RegStats proto{&target, &w, 0.0, 0.0};
  auto leaf = [&](const std::vector<int>& rs) { return Eigen::Vector3d(leaf_value(rs), 0.0, 0.0); };
  auto constant = [&](const std::vector<int>& rs) {
    const double first = target(rs.front());
    return std::all_of(rs.begin(), rs.end(), [&](int r) { return target(r) == first; });
  };
  Tree t;
  grow(t, x, rows, 0, params, nullptr, proto, leaf, constant);
  return t;
}

}  // namespace loa::detail
