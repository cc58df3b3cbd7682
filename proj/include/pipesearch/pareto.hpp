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

#pragma once

#include <span>
#include <vector>

namespace pipesearch {

// Pareto dominance with every objective maximized.
bool dominates(std::span<const double> a, std::span<const double> b);

// Fronts of indices into `points`; front 0 is non-dominated. Indices within a
// front keep input order.
std::vector<std::vector<std::size_t>> non_dominated_sort(std::span<const std::vector<double>> points);

// Crowding distance of each point of one front, in input order.
std::vector<double> crowding_distance(std::span<const std::vector<double>> front);

}  // namespace pipesearch
