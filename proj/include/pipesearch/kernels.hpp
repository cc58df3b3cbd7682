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

#include <cstdint>
#include <span>
#include <vector>

#include "pipesearch/matrix.hpp"
#include "pipesearch/metrics.hpp"

// Data-parallel inner loops. Every kernel has a plain serial version, kept as
// the reference for tests and benchmarks, and an OpenMP version that must
// produce bit-identical output (each output element is computed by exactly
// the same arithmetic in both).
namespace pipesearch::kernels {

namespace serial {

// out(i, j) = squared Euclidean distance between queries row i and refs row j.
Matrix squared_distances(const Matrix& queries, const Matrix& refs);

// n*n flags; entry i*n + j is 1 iff point i Pareto-dominates point j.
std::vector<std::uint8_t> dominance_matrix(std::span<const std::vector<double>> points);

// Metric of (sum + candidates[m]) / (count + 1) for every candidate m.
std::vector<double> blend_scores(const Matrix& sum, std::size_t count, std::span<const Matrix* const> candidates,
                                 std::span<const int> truth, Metric metric);

}  // namespace serial

namespace parallel {

Matrix squared_distances(const Matrix& queries, const Matrix& refs);
std::vector<std::uint8_t> dominance_matrix(std::span<const std::vector<double>> points);
std::vector<double> blend_scores(const Matrix& sum, std::size_t count, std::span<const Matrix* const> candidates,
                                 std::span<const int> truth, Metric metric);

}  // namespace parallel

}  // namespace pipesearch::kernels
