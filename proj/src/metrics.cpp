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

#include "pipesearch/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "pipesearch/errors.hpp"

namespace pipesearch {

Metric metric_from_name(std::string_view name) {
  if (name == "accuracy") return Metric::accuracy;
  if (name == "neg_log_loss") return Metric::neg_log_loss;
  if (name == "macro_f1") return Metric::macro_f1;
  throw Error("unknown metric '" + std::string(name) + "'");
}

std::string_view metric_name(Metric metric) {
  switch (metric) {
    case Metric::accuracy: return "accuracy";
    case Metric::neg_log_loss: return "neg_log_loss";
    case Metric::macro_f1: return "macro_f1";
  }
  return "accuracy";
}

std::size_t argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < row.size(); ++c)
    if (row[c] > row[best]) best = c;
  return best;
}

double score(const Matrix& probabilities, std::span<const int> truth, Metric metric) {
  if (probabilities.rows() != truth.size())
    throw Error("score: " + std::to_string(probabilities.rows()) + " prediction rows for " +
                std::to_string(truth.size()) + " labels");
  const auto n = truth.size();
  if (n == 0) return 0.0;

  switch (metric) {
    case Metric::accuracy: {
      std::size_t correct = 0;
      for (std::size_t i = 0; i < n; ++i)
        if (argmax(probabilities.row(i)) == static_cast<std::size_t>(truth[i])) ++correct;
      return static_cast<double>(correct) / static_cast<double>(n);
    }
    case Metric::neg_log_loss: {
      double total = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double p = std::clamp(probabilities(i, static_cast<std::size_t>(truth[i])), kProbabilityClip,
                                    1.0 - kProbabilityClip);
        total += std::log(p);
      }
      return total / static_cast<double>(n);
    }
    case Metric::macro_f1: {
      const auto classes = probabilities.cols();
      std::vector<double> tp(classes, 0.0), fp(classes, 0.0), fn(classes, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        const auto pred = argmax(probabilities.row(i));
        const auto actual = static_cast<std::size_t>(truth[i]);
        if (pred == actual) {
          tp[pred] += 1.0;
        } else {
          fp[pred] += 1.0;
          fn[actual] += 1.0;
        }
      }
      double sum = 0.0;
      for (std::size_t c = 0; c < classes; ++c) {
        const double denom = 2.0 * tp[c] + fp[c] + fn[c];
        sum += denom > 0.0 ? 2.0 * tp[c] / denom : 0.0;
      }
      return sum / static_cast<double>(classes);
    }
  }
  return 0.0;
}

}  // namespace pipesearch
