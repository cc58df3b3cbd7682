// Copyright 2026 The pipesearch Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pipesearch/pareto.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "pipesearch/errors.hpp"
#include "pipesearch/kernels.hpp"

namespace pipesearch {

bool dominates(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("dominates: objective vectors differ in length");
  bool strictly = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    if (a[i] > b[i]) strictly = true;
  }
  return strictly;
}

std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const std::vector<double>> points) {
  const auto n = points.size();
  std::vector<std::vector<std::size_t>> fronts;
  if (n == 0) return fronts;

  const auto dom = kernels::parallel::dominance_matrix(points);
  std::vector<std::size_t> dominated_by(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dominated_by[j] += dom[i * n + j];

  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i)
    if (dominated_by[i] == 0) current.push_back(i);
  while (!current.empty()) {
    std::vector<std::size_t> next;
    for (auto i : current)
      for (std::size_t j = 0; j < n; ++j)
        if (dom[i * n + j] != 0 && --dominated_by[j] == 0) next.push_back(j);
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }
  return fronts;
}

std::vector<double> crowding_distance(std::span<const std::vector<double>> front) {
  const auto n = front.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (n <= 2) return std::vector<double>(n, inf);

  std::vector<double> distance(n, 0.0);
  const auto objectives = front.front().size();
  std::vector<std::size_t> order(n);
  for (std::size_t m = 0; m < objectives; ++m) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return front[a][m] < front[b][m]; });
    const double lo = front[order.front()][m];
    const double hi = front[order.back()][m];
    if (!(hi > lo)) continue;
    distance[order.front()] = inf;
    distance[order.back()] = inf;
    for (std::size_t k = 1; k + 1 < n; ++k)
      distance[order[k]] += (front[order[k + 1]][m] - front[order[k - 1]][m]) / (hi - lo);
  }
  return distance;
}

}  // namespace pipesearch
