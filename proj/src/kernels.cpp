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

#include "pipesearch/kernels.hpp"

#include "pipesearch/errors.hpp"
#include "pipesearch/pareto.hpp"

namespace pipesearch::kernels {

namespace {

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = a[k] - b[k];
    d += t * t;
  }
  return d;
}

double blend_one(const Matrix& sum, std::size_t count, const Matrix& candidate, std::span<const int> truth,
                 Metric metric) {
  Matrix blended(sum.rows(), sum.cols());
  const double denom = static_cast<double>(count + 1);
  const auto s = sum.data();
  const auto c = candidate.data();
  auto out = blended.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (s[i] + c[i]) / denom;
  return score(blended, truth, metric);
}

void check_lengths(std::span<const std::vector<double>> points) {
  for (const auto& p : points)
    if (p.size() != points.front().size()) throw Error("dominance: objective vectors differ in length");
}

}  // namespace

namespace serial {

Matrix squared_distances(const Matrix& queries, const Matrix& refs) {
  Matrix out(queries.rows(), refs.rows());
  for (std::size_t i = 0; i < queries.rows(); ++i)
    for (std::size_t j = 0; j < refs.rows(); ++j) out(i, j) = squared_distance(queries.row(i), refs.row(j));
  return out;
}

std::vector<std::uint8_t> dominance_matrix(std::span<const std::vector<double>> points) {
  const auto n = points.size();
  if (n > 0) check_lengths(points);
  std::vector<std::uint8_t> out(n * n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = dominates(points[i], points[j]) ? 1 : 0;
  return out;
}

std::vector<double> blend_scores(const Matrix& sum, std::size_t count, std::span<const Matrix* const> candidates,
                                 std::span<const int> truth, Metric metric) {
  std::vector<double> out(candidates.size());
  for (std::size_t m = 0; m < candidates.size(); ++m) out[m] = blend_one(sum, count, *candidates[m], truth, metric);
  return out;
}

}  // namespace serial

namespace parallel {

Matrix squared_distances(const Matrix& queries, const Matrix& refs) {
  Matrix out(queries.rows(), refs.rows());
  const auto rows = static_cast<std::ptrdiff_t>(queries.rows());
#pragma omp parallel for schedule(static) if (queries.rows() * refs.rows() > 4096)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto q = queries.row(static_cast<std::size_t>(i));
    for (std::size_t j = 0; j < refs.rows(); ++j) out(static_cast<std::size_t>(i), j) = squared_distance(q, refs.row(j));
  }
  return out;
}

std::vector<std::uint8_t> dominance_matrix(std::span<const std::vector<double>> points) {
  const auto n = points.size();
  if (n > 0) check_lengths(points);
  std::vector<std::uint8_t> out(n * n, 0);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static) if (n > 64)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto& a = points[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < n; ++j) out[static_cast<std::size_t>(i) * n + j] = dominates(a, points[j]) ? 1 : 0;
  }
  return out;
}

std::vector<double> blend_scores(const Matrix& sum, std::size_t count, std::span<const Matrix* const> candidates,
                                 std::span<const int> truth, Metric metric) {
  std::vector<double> out(candidates.size());
  const auto m_count = static_cast<std::ptrdiff_t>(candidates.size());
#pragma omp parallel for schedule(dynamic) if (candidates.size() > 4)
  for (std::ptrdiff_t m = 0; m < m_count; ++m)
    out[static_cast<std::size_t>(m)] = blend_one(sum, count, *candidates[static_cast<std::size_t>(m)], truth, metric);
  return out;
}

}  // namespace parallel

}  // namespace pipesearch::kernels
