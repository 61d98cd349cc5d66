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

#ifndef LOA_SRC_TREE_IMPL_HPP_
#define LOA_SRC_TREE_IMPL_HPP_

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "loa/util.hpp"

namespace loa::detail {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  Eigen::Vector3d value = Eigen::Vector3d::Zero();
};

class Tree {
 public:
  std::vector<TreeNode> nodes;

  const Eigen::Vector3d& leaf(const Eigen::Ref<const Eigen::RowVectorXd>& row) const;
  int depth() const;
  nlohmann::json to_json() const;
  static Tree from_json(const nlohmann::json& j);
};

struct TreeParams {
  int max_depth = 0;  // 0 = unlimited
  int min_samples_split = 2;
  int max_features = 0;  // columns tried per split; 0 = all
};

// Gini CART over `rows` (repeats allowed). Leaves hold the weighted class
// distribution. An impure node is split whenever a valid threshold exists.
Tree grow_classification_tree(const Eigen::MatrixXd& x, const std::vector<int>& y, const Eigen::VectorXd& w,
                              const std::vector<int>& rows, const TreeParams& params, Rng& rng);

// Least-squares regression tree on `target`; leaf values come from
// `leaf_value` applied to the rows reaching the leaf.
using LeafValueFn = std::function<double(const std::vector<int>&)>;
Tree grow_regression_tree(const Eigen::MatrixXd& x, const Eigen::VectorXd& target, const Eigen::VectorXd& w,
                          const std::vector<int>& rows, const TreeParams& params, const LeafValueFn& leaf_value);

}  // namespace loa::detail

#endif  // LOA_SRC_TREE_IMPL_HPP_
