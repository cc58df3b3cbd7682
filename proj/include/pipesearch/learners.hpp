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
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pipesearch/cancel.hpp"
#include "pipesearch/matrix.hpp"
#include "pipesearch/search_space.hpp"

namespace pipesearch {

using Params = std::map<std::string, HyperparamValue>;

struct FitContext {
  std::uint64_t seed = 0;
  CancelToken cancel;
};

class Transformer {
 public:
  virtual ~Transformer() = default;
  virtual void fit(const Matrix& x, std::span<const int> y, std::size_t classes, const FitContext& ctx) = 0;
  virtual Matrix transform(const Matrix& x) const = 0;
  virtual nlohmann::json state() const = 0;
  virtual void load(const nlohmann::json& state) = 0;
};

class Estimator {
 public:
  virtual ~Estimator() = default;
  virtual void fit(const Matrix& x, std::span<const int> y, std::size_t classes, const FitContext& ctx) = 0;
  // One row of class probabilities per input row.
  virtual Matrix predict_proba(const Matrix& x, const CancelToken& cancel) const = 0;
  virtual nlohmann::json state() const = 0;
  virtual void load(const nlohmann::json& state) = 0;
};

struct ComponentFactory {
  Role role = Role::estimator;
  std::function<std::unique_ptr<Transformer>(const Params&)> make_transformer;
  std::function<std::unique_ptr<Estimator>(const Params&)> make_estimator;
};

// Process-wide catalog of component implementations, seeded with the
// built-ins. Registration is meant for start-up (and tests); lookups are
// safe from any thread.
void register_component(const std::string& id, ComponentFactory factory);
const ComponentFactory& component_factory(std::string_view id);
bool has_component(std::string_view id);

// A pipeline with every step fitted.
class FittedPipeline {
 public:
  // Throws FitError naming the failing step (Cancelled passes through).
  static FittedPipeline fit(const Pipeline& pipeline, const Matrix& x, std::span<const int> y,
                            std::size_t classes, const FitContext& ctx);

  // Rows are validated and renormalized onto the probability simplex.
  Matrix predict_proba(const Matrix& x, const CancelToken& cancel = {}) const;

  const Pipeline& pipeline() const { return pipeline_; }
  std::size_t classes() const { return classes_; }

  nlohmann::json to_json() const;
  static FittedPipeline from_json(const nlohmann::json& j);

 private:
  Pipeline pipeline_;
  std::size_t classes_ = 0;
  std::vector<std::shared_ptr<Transformer>> transformers_;
  std::shared_ptr<Estimator> estimator_;
};

nlohmann::json value_to_json(const HyperparamValue& value);
HyperparamValue value_from_json(const nlohmann::json& j);

// Mean softmax cross-entropy plus (l2 / 2) * ||weights||^2 (bias excluded),
// with its gradient. weights is classes x features.
double softmax_objective(const Matrix& x, std::span<const int> y, double l2, const Matrix& weights,
                         std::span<const double> bias, Matrix& grad_weights, std::vector<double>& grad_bias);

}  // namespace pipesearch
