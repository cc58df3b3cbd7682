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

#include <atomic>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pipesearch/dataset.hpp"
#include "pipesearch/evaluation.hpp"
#include "pipesearch/learners.hpp"

namespace pipesearch {

inline constexpr int kModelFormatVersion = 1;

// Indices of the results eligible for post-processing: ok, not served from
// the duplicate cache, with predictions, at the highest fidelity present.
std::vector<std::size_t> usable_library(std::span<const EvaluationResult> library);

// Highest objectives[0]; ties go to the shorter pipeline, then the earlier
// start. Throws Error("search produced no usable pipeline").
const EvaluationResult& select_best(std::span<const EvaluationResult> library);

struct Ensemble {
  struct Member {
    std::size_t library_index = 0;
    std::string pipeline;
    std::size_t count = 0;
    double weight = 0.0;
  };
  std::vector<Member> members;    // in order of first selection
  std::vector<std::size_t> picks;  // library index chosen at each step
  std::vector<double> step_scores;  // validation metric after each step
  std::size_t kept = 0;  // members come from the best-scoring prefix picks[0, kept)
  Metric metric = Metric::accuracy;

  double final_score() const { return kept == 0 ? 0.0 : step_scores[kept - 1]; }
};

// Greedy forward selection with replacement over out-of-fold predictions,
// starting from the single best model. The ensemble returned is the prefix of
// the selection sequence with the best score (earliest on ties), so it never
// scores below the best single model. Stops early (keeping what it has) if
// `stop` is raised between steps.
Ensemble ensemble_select(std::span<const EvaluationResult> library, std::size_t target_size, Metric metric,
                         std::span<const int> truth, const std::atomic<bool>* stop = nullptr);

// Weighted average of member probabilities.
Matrix ensemble_predict(std::span<const double> weights, std::span<const FittedPipeline* const> members,
                        const Matrix& rows);

FittedPipeline fit_final(const Pipeline& pipeline, const Dataset& ds, std::uint64_t seed,
                         const CancelToken& cancel = {});

// Deployable artifact: feature encoding plus one or more weighted pipelines.
class Model {
 public:
  struct Member {
    double weight = 1.0;
    FittedPipeline fitted;
  };

  std::string kind;  // "best" or "ensemble"
  FeatureEncoder encoder;
  std::vector<std::string> class_names;
  std::vector<Member> members;

  Matrix predict_proba(const Matrix& features) const;
  Matrix predict_proba(const Table& table) const;

  nlohmann::json to_json() const;
  static Model from_json(const nlohmann::json& j);
  void save(const std::filesystem::path& path) const;
  static Model load(const std::filesystem::path& path);
};

// Refits every member on the full dataset. Members whose refit fails are
// dropped (with a warning) and the remaining weights renormalized; throws if
// none survive. A raised `stop` skips the members not yet refit, once at
// least one is in.
Model build_ensemble_model(const Ensemble& ensemble, std::span<const EvaluationResult> library, const Dataset& ds,
                           const FeatureEncoder& encoder, std::uint64_t seed, const CancelToken& cancel,
                           std::vector<std::string>& warnings, const std::atomic<bool>* stop = nullptr);

}  // namespace pipesearch
