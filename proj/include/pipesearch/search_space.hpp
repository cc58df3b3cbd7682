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
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "pipesearch/errors.hpp"
#include "pipesearch/rng.hpp"

namespace pipesearch {

enum class Scale { linear, log };

struct CategoricalDomain {
  std::vector<std::string> values;
};

struct IntegerDomain {
  std::int64_t lo = 0;
  std::int64_t hi = 1;
  Scale scale = Scale::linear;
};

struct RealDomain {
  double lo = 0.0;
  double hi = 1.0;
  Scale scale = Scale::linear;
};

struct BooleanDomain {};

using HyperparamDomain =
    std::variant<CategoricalDomain, IntegerDomain, RealDomain, BooleanDomain>;

using HyperparamValue = std::variant<bool, std::int64_t, double, std::string>;

struct HyperparamSpec {
  std::string name;
  HyperparamDomain domain;
};

enum class Role { transformer, estimator };

struct ComponentSpec {
  std::string id;
  Role role = Role::estimator;
  std::vector<HyperparamSpec> hyperparams;

  const HyperparamSpec* find(std::string_view name) const;
};

struct SearchSpace {
  std::vector<ComponentSpec> components;
  std::int64_t max_pipeline_length = 1;

  const ComponentSpec* find(std::string_view id) const;
  std::vector<const ComponentSpec*> with_role(Role role) const;
};

struct Step {
  std::string component;
  std::map<std::string, HyperparamValue> params;

  friend bool operator==(const Step&, const Step&) = default;
};

struct Pipeline {
  std::vector<Step> steps;

  std::size_t size() const { return steps.size(); }
  friend bool operator==(const Pipeline&, const Pipeline&) = default;
};

// How a candidate came to be. `op` is only used by mutation.
struct OriginTag {
  enum class Kind { seed, random, mutation, crossover, promotion };

  Kind kind = Kind::random;
  std::string op;
  std::vector<std::string> parent_ids;

  std::string to_string() const;
  static OriginTag parse(std::string_view text, std::vector<std::string> parents);
  friend bool operator==(const OriginTag&, const OriginTag&) = default;
};

struct Offspring {
  Pipeline pipeline;
  OriginTag origin;
};

std::vector<Violation> validate_space(const SearchSpace& space);
std::vector<Violation> validate_pipeline(const Pipeline& pipeline, const SearchSpace& space);
bool value_in_domain(const HyperparamValue& value, const HyperparamDomain& domain);

HyperparamValue sample_value(const HyperparamDomain& domain, Rng& rng);
Pipeline sample_pipeline(const SearchSpace& space, Rng& rng);

// Applies exactly one variation operator, chosen uniformly among those that
// can change `pipeline`. Throws SearchSpaceError("no applicable mutation").
Offspring mutate(const Pipeline& pipeline, const std::string& parent_id,
                 const SearchSpace& space, Rng& rng);

// Single-point crossover, falling back to a hyperparameter exchange.
// Throws SearchSpaceError("degenerate crossover") if neither changes anything.
Offspring crossover(const Pipeline& a, const std::string& a_id, const Pipeline& b,
                    const std::string& b_id, const SearchSpace& space, Rng& rng);

// Grammar: step (">" step)*, step = id "(" [name "=" value ("," name "=" value)*] ")".
std::string canonical_encode(const Pipeline& pipeline);
Pipeline canonical_decode(std::string_view text, const SearchSpace& space);

std::string format_value(const HyperparamValue& value);

// Declarative JSON form of a search space.
SearchSpace space_from_json(const nlohmann::json& doc);
nlohmann::json space_to_json(const SearchSpace& space);

// The built-in catalog with its default domains.
SearchSpace default_search_space();

}  // namespace pipesearch
