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

#ifndef LOA_FRECHET_HPP_
#define LOA_FRECHET_HPP_

#include <algorithm>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "loa/geometry.hpp"
#include "loa/types.hpp"

namespace loa {

template <class Scalar>
using Polyline = std::vector<Vec2<Scalar>>;

// Discrete Frechet distance: the minimum over monotone couplings of the two
// point sequences of the largest coupled Euclidean distance. O(|a| |b|)
// time, O(|b|) memory.
template <class Scalar>
Scalar discrete_frechet(std::span<const Vec2<Scalar>> a, std::span<const Vec2<Scalar>> b) {
  if (a.empty() || b.empty()) throw Error("discrete_frechet needs non-empty polylines");
  const std::size_t m = b.size();
  std::vector<Scalar> prev(m), cur(m);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const Scalar d = (a[i] - b[j]).norm();
      Scalar reach;
      if (i == 0 && j == 0) reach = d;
      else if (i == 0) reach = cur[j - 1];
      else if (j == 0) reach = prev[j];
      else reach = std::min({prev[j], prev[j - 1], cur[j - 1]});
      cur[j] = std::max(reach, d);
    }
    std::swap(prev, cur);
  }
  return prev[m - 1];
}

template <class Scalar>
Scalar discrete_frechet(const Polyline<Scalar>& a, const Polyline<Scalar>& b) {
  return discrete_frechet<Scalar>(std::span<const Vec2<Scalar>>(a), std::span<const Vec2<Scalar>>(b));
}

}  // namespace loa

#endif  // LOA_FRECHET_HPP_
