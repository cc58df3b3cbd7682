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

#include "pipesearch/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pipesearch/errors.hpp"
#include "pipesearch/pareto.hpp"

namespace pipesearch {

namespace {

constexpr double kFidelityTolerance = 1e-9;

CandidateRequest fresh_sample(const SearchSpace& space, double fidelity, Rng& rng) {
  return {sample_pipeline(space, rng), fidelity, OriginTag{OriginTag::Kind::random, "", {}}};
}

}  // namespace

CandidateRequest RandomSearch::dispatch(Rng& rng) { return fresh_sample(space_, 1.0, rng); }

std::vector<double> asha_fidelities(const AshaParams& params) {
  std::vector<double> out;
  double f = params.min_fidelity;
  while (f < 1.0 - kFidelityTolerance) {
    out.push_back(f);
    f *= static_cast<double>(params.eta);
  }
  out.push_back(1.0);
  return out;
}

Asha::Asha(SearchSpace space, AshaParams params) : space_(std::move(space)), params_(params) {
  if (params_.eta < 2) throw Error("asha: eta must be at least 2");
  if (!(params_.min_fidelity > 0.0 && params_.min_fidelity <= 1.0))
    throw Error("asha: min_fidelity must lie in (0, 1]");
  for (double f : asha_fidelities(params_)) rungs_.push_back(AshaRung{f, {}, {}});
}

std::size_t Asha::rung_of(double fidelity) const {
  for (std::size_t k = 0; k < rungs_.size(); ++k)
    if (std::abs(rungs_[k].fidelity - fidelity) <= kFidelityTolerance) return k;
  throw Error("foreign result: fidelity " + std::to_string(fidelity) + " matches no rung");
}

CandidateRequest Asha::dispatch(Rng& rng) {
  const auto eta = static_cast<std::size_t>(params_.eta);
  for (std::size_t k = rungs_.size() - 1; k-- > 0;) {
    auto& rung = rungs_[k];
    const auto slots = rung.entries.size() / eta;
    if (slots == 0) continue;
    std::vector<std::size_t> order(rung.entries.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rung.entries[a].score > rung.entries[b].score; });
    for (std::size_t i = 0; i < slots; ++i) {
      const auto& entry = rung.entries[order[i]];
      if (!std::isfinite(entry.score) || rung.promoted.contains(entry.eval_id)) continue;
      rung.promoted.insert(entry.eval_id);
      return {entry.pipeline, rungs_[k + 1].fidelity, OriginTag{OriginTag::Kind::promotion, "", {entry.eval_id}}};
    }
  }
  return fresh_sample(space_, rungs_.front().fidelity, rng);
}

void Asha::receive(const EvaluationResult& result) {
  auto& rung = rungs_[rung_of(result.fidelity)];
  const double score = result.ok() ? result.objectives.at(0) : -std::numeric_limits<double>::infinity();
  rung.entries.push_back({result.eval_id(), score, result.pipeline});
}

void assign_rank_and_crowding(std::vector<Individual>& population) {
  std::vector<std::vector<double>> points;
  points.reserve(population.size());
  for (const auto& ind : population) points.push_back(ind.result.objectives);
  const auto fronts = non_dominated_sort(points);
  for (std::size_t f = 0; f < fronts.size(); ++f) {
    std::vector<std::vector<double>> front;
    for (auto i : fronts[f]) front.push_back(points[i]);
    const auto crowd = crowding_distance(front);
    for (std::size_t j = 0; j < fronts[f].size(); ++j) {
      population[fronts[f][j]].rank = f + 1;
      population[fronts[f][j]].crowding = crowd[j];
    }
  }
}

std::vector<std::size_t> nsga2_select(std::span<const Individual> population, std::size_t n, Rng& rng) {
  if (population.empty()) throw Error("nsga2_select: empty population");
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto a = rng.index(population.size());
    const auto b = rng.index(population.size());
    const auto& x = population[a];
    const auto& y = population[b];
    if (x.rank != y.rank) {
      out.push_back(x.rank < y.rank ? a : b);
    } else if (x.crowding != y.crowding) {
      out.push_back(x.crowding > y.crowding ? a : b);
    } else {
      out.push_back(rng.coin() ? a : b);
    }
  }
  return out;
}

bool evicts_before(const Individual& a, const Individual& b) {
  if (a.rank != b.rank) return a.rank > b.rank;
  if (a.crowding != b.crowding) return a.crowding < b.crowding;
  return a.result.seq < b.result.seq;
}

Evolution::Evolution(SearchSpace space, EvoParams params) : space_(std::move(space)), params_(params) {
  if (params_.population_size < 1) throw Error("evolution: population_size must be at least 1");
  if (!(params_.crossover_probability >= 0.0 && params_.crossover_probability <= 1.0))
    throw Error("evolution: crossover_probability must lie in [0, 1]");
}

CandidateRequest Evolution::dispatch(Rng& rng) {
  if (population_.size() < params_.population_size) return fresh_sample(space_, 1.0, rng);

  std::size_t parent = 0;
  if (rng.bernoulli(params_.crossover_probability)) {
    const auto picks = nsga2_select(population_, 2, rng);
    parent = picks[0];
    if (picks[0] != picks[1]) {
      const auto& a = population_[picks[0]].result;
      const auto& b = population_[picks[1]].result;
      try {
        auto child = crossover(a.pipeline, a.eval_id(), b.pipeline, b.eval_id(), space_, rng);
        return {std::move(child.pipeline), 1.0, std::move(child.origin)};
      } catch (const SearchSpaceError&) {
        // degenerate pair: mutate the first parent instead
      }
    }
  } else {
    parent = nsga2_select(population_, 1, rng)[0];
  }
  const auto& p = population_[parent].result;
  try {
    auto child = mutate(p.pipeline, p.eval_id(), space_, rng);
    return {std::move(child.pipeline), 1.0, std::move(child.origin)};
  } catch (const SearchSpaceError&) {
    return fresh_sample(space_, 1.0, rng);
  }
}

void Evolution::receive(const EvaluationResult& result) {
  if (!result.ok()) return;
  Individual ind;
  ind.result = result;
  ind.result.predictions.reset();
  population_.push_back(std::move(ind));
  assign_rank_and_crowding(population_);
  if (population_.size() > params_.population_size) {
    const auto worst = std::max_element(population_.begin(), population_.end(),
                                        [](const Individual& a, const Individual& b) { return evicts_before(b, a); });
    population_.erase(worst);
    assign_rank_and_crowding(population_);
  }
}

std::vector<std::string> strategy_names() { return {"random", "asha", "evolution"}; }

std::unique_ptr<SearchStrategy> make_strategy(std::string_view name, const nlohmann::json& params,
                                              const SearchSpace& space) {
  std::vector<Violation> violations;
  const nlohmann::json p = params.is_null() ? nlohmann::json::object() : params;
  if (!p.is_object()) throw ConfigError(std::vector<Violation>{{"search.params", "expected an object"}});

  auto known = [&](std::initializer_list<const char*> keys) {
    for (const auto& [key, value] : p.items())
      if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return key == k; }))
        violations.push_back({"search.params." + key, "unknown parameter for strategy " + std::string(name)});
  };
  auto number = [&](const char* key, double fallback) {
    if (!p.contains(key)) return fallback;
    if (!p[key].is_number()) {
      violations.push_back({std::string("search.params.") + key, "expected a number"});
      return fallback;
    }
    return p[key].get<double>();
  };

  if (name == "random") {
    known({});
    if (!violations.empty()) throw ConfigError(violations);
    return std::make_unique<RandomSearch>(space);
  }
  if (name == "asha") {
    known({"eta", "min_fidelity"});
    AshaParams ap;
    const double eta = number("eta", 3.0);
    ap.min_fidelity = number("min_fidelity", 1.0 / 9.0);
    if (eta < 2 || eta != std::floor(eta)) violations.push_back({"search.params.eta", "must be an integer >= 2"});
    if (!(ap.min_fidelity > 0.0 && ap.min_fidelity <= 1.0))
      violations.push_back({"search.params.min_fidelity", "must lie in (0, 1]"});
    if (!violations.empty()) throw ConfigError(violations);
    ap.eta = static_cast<std::int64_t>(eta);
    return std::make_unique<Asha>(space, ap);
  }
  if (name == "evolution") {
    known({"population_size", "crossover_probability"});
    EvoParams ep;
    const double mu = number("population_size", 50.0);
    ep.crossover_probability = number("crossover_probability", 0.5);
    if (mu < 1 || mu != std::floor(mu))
      violations.push_back({"search.params.population_size", "must be a positive integer"});
    if (!(ep.crossover_probability >= 0.0 && ep.crossover_probability <= 1.0))
      violations.push_back({"search.params.crossover_probability", "must lie in [0, 1]"});
    if (!violations.empty()) throw ConfigError(violations);
    ep.population_size = static_cast<std::size_t>(mu);
    return std::make_unique<Evolution>(space, ep);
  }
  std::string names;
  for (const auto& n : strategy_names()) names += (names.empty() ? "" : ", ") + n;
  throw ConfigError(std::vector<Violation>{{"search.name", "unknown strategy '" + std::string(name) + "' (registered: " + names + ")"}});
}

}  // namespace pipesearch
