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
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pipesearch/evaluation.hpp"
#include "pipesearch/rng.hpp"
#include "pipesearch/search_space.hpp"

namespace pipesearch {

struct CandidateRequest {
  Pipeline pipeline;
  double fidelity = 1.0;
  OriginTag origin;
};

// Asynchronous search contract. dispatch() always returns a candidate right
// away, whatever is still being evaluated; receive() is the only way the
// strategy learns anything. The caller serializes all calls.
class SearchStrategy {
 public:
  virtual ~SearchStrategy() = default;
  virtual std::string_view name() const = 0;
  virtual CandidateRequest dispatch(Rng& rng) = 0;
  virtual void receive(const EvaluationResult& result) = 0;
};

class RandomSearch : public SearchStrategy {
 public:
  explicit RandomSearch(SearchSpace space) : space_(std::move(space)) {}
  std::string_view name() const override { return "random"; }
  CandidateRequest dispatch(Rng& rng) override;
  void receive(const EvaluationResult&) override {}

 private:
  SearchSpace space_;
};

// --- asynchronous successive halving ---

struct AshaParams {
  std::int64_t eta = 3;
  double min_fidelity = 1.0 / 9.0;
};

struct AshaRung {
  struct Entry {
    std::string eval_id;
    double score = 0.0;  // -inf for failed evaluations
    Pipeline pipeline;
  };
  double fidelity = 1.0;
  std::vector<Entry> entries;
  std::set<std::string> promoted;
};

// Fidelities min_fidelity * eta^k, capped at (and ending with) 1.0.
std::vector<double> asha_fidelities(const AshaParams& params);

class Asha : public SearchStrategy {
 public:
  Asha(SearchSpace space, AshaParams params);
  std::string_view name() const override { return "asha"; }
  CandidateRequest dispatch(Rng& rng) override;
  // Throws Error("foreign result") when the fidelity matches no rung.
  void receive(const EvaluationResult& result) override;

  const std::vector<AshaRung>& rungs() const { return rungs_; }
  std::size_t rung_of(double fidelity) const;

 private:
  SearchSpace space_;
  AshaParams params_;
  std::vector<AshaRung> rungs_;
};

// --- steady-state NSGA-II evolution ---

struct EvoParams {
  std::size_t population_size = 50;
  double crossover_probability = 0.5;
};

struct Individual {
  EvaluationResult result;
  std::size_t rank = 1;  // 1 = non-dominated
  double crowding = 0.0;
};

// Recomputes rank and crowding distance of every individual.
void assign_rank_and_crowding(std::vector<Individual>& population);

// Binary tournaments: lower rank wins, then larger crowding, then a coin.
std::vector<std::size_t> nsga2_select(std::span<const Individual> population, std::size_t n, Rng& rng);

// True if `a` should be evicted before `b`: higher rank, then smaller
// crowding distance, then older (smaller eval id).
bool evicts_before(const Individual& a, const Individual& b);

class Evolution : public SearchStrategy {
 public:
  Evolution(SearchSpace space, EvoParams params);
  std::string_view name() const override { return "evolution"; }
  CandidateRequest dispatch(Rng& rng) override;
  void receive(const EvaluationResult& result) override;

  const std::vector<Individual>& population() const { return population_; }

 private:
  SearchSpace space_;
  EvoParams params_;
  std::vector<Individual> population_;
};

std::vector<std::string> strategy_names();
// Validates `params` against the named strategy; throws ConfigError with
// paths under "search.params".
std::unique_ptr<SearchStrategy> make_strategy(std::string_view name, const nlohmann::json& params,
                                              const SearchSpace& space);

}  // namespace pipesearch
