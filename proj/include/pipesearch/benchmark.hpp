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
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "pipesearch/config.hpp"
#include "pipesearch/dataset.hpp"
#include "pipesearch/orchestrator.hpp"

namespace pipesearch {

struct HoldoutOutcome {
  RunResult run;
  std::optional<double> holdout_score;     // run metric on the holdout rows
  std::optional<double> holdout_accuracy;
  double majority_accuracy = 0.0;          // training majority class on the holdout
};

// Splits `table` into stratified train/holdout parts, runs `cfg` on the
// training part and scores the resulting model on the holdout.
HoldoutOutcome run_with_holdout(const RunConfig& cfg, const Table& table, double holdout_fraction,
                                std::uint64_t split_seed);

struct BenchmarkRow {
  std::string dataset;
  std::string config;
  std::uint64_t seed = 0;
  std::string status;  // run phase, or "failed"
  std::optional<double> metric;
  double duration_s = 0.0;
  std::string message;
};

// Runs every dataset x config x seed cell of a suite document, one after the
// other. A failing cell becomes a "failed" row; the suite carries on.
std::vector<BenchmarkRow> run_benchmark(const nlohmann::json& suite, const std::string& base_dir,
                                        std::ostream* progress = nullptr);

// Columns: dataset,config,seed,status,metric,duration_s,message.
std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);

}  // namespace pipesearch
