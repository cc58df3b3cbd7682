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
#include <string>
#include <vector>

#include "json.hpp"
#include "pipesearch/errors.hpp"
#include "pipesearch/metrics.hpp"
#include "pipesearch/search_space.hpp"

namespace pipesearch {

inline constexpr int kConfigFormatVersion = 1;

struct BudgetConfig {
  double total_seconds = 60.0;
  std::optional<double> per_eval_timeout_seconds;  // default 0.1 * total
  std::optional<double> post_processing_fraction;  // default per post-processor
};

struct RunConfig {
  std::string dataset_path;
  std::string target;
  std::string search = "evolution";
  nlohmann::json search_params = nlohmann::json::object();
  std::string post = "ensemble";
  nlohmann::json post_params = nlohmann::json::object();
  Metric metric = Metric::accuracy;
  BudgetConfig budget;
  std::uint64_t seed = 0;
  std::size_t n_workers = 1;
  std::size_t cv_folds = 5;
  std::size_t max_evaluations = 0;  // 0 = bounded by time only
  SearchSpace space;
  std::optional<std::string> search_space_file;
  std::string output_dir = "pipesearch-out";
  std::string run_id;  // empty = assigned at start
};

// Worker count used when the config leaves n_workers out: PIPESEARCH_WORKERS
// if set to a positive integer, else the hardware concurrency.
std::size_t default_workers();

std::vector<std::string> post_processor_names();

// Parses and validates a config document. Collects every problem it can find
// and throws ConfigError with field paths such as "budget.total_seconds".
// Relative paths resolve against `base_dir`.
RunConfig config_from_json(const nlohmann::json& doc, const std::string& base_dir = "");
RunConfig load_config(const std::string& path);
nlohmann::json config_to_json(const RunConfig& cfg);

// Machine-readable description of the accepted fields.
nlohmann::json config_schema();

}  // namespace pipesearch
