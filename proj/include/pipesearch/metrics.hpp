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
#include <string>
#include <string_view>

#include "pipesearch/matrix.hpp"

namespace pipesearch {

// All metrics are maximized.
enum class Metric { accuracy, neg_log_loss, macro_f1 };

Metric metric_from_name(std::string_view name);
std::string_view metric_name(Metric metric);

inline constexpr double kProbabilityClip = 1e-15;

// Row-wise argmax; ties go to the lowest class index.
std::size_t argmax(std::span<const double> row);

double score(const Matrix& probabilities, std::span<const int> truth, Metric metric);

}  // namespace pipesearch
