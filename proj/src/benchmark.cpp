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

#include "pipesearch/benchmark.hpp"

#include <algorithm>
#include <filesystem>
#include <map>

#include "pipesearch/metrics.hpp"
#include "pipesearch/postprocess.hpp"

namespace pipesearch {

using nlohmann::json;

HoldoutOutcome run_with_holdout(const RunConfig& cfg, const Table& table, double holdout_fraction,
                                std::uint64_t split_seed) {
  const auto target = table.column(cfg.target);
  if (target < 0)
    throw DatasetError(DatasetError::Code::missing_target_column, "target column '" + cfg.target + "' not found");
  std::map<std::string, int> class_index;
  for (const auto& row : table.rows) class_index.emplace(row[static_cast<std::size_t>(target)], 0);
  int next = 0;
  for (auto& [name, idx] : class_index) idx = next++;
  std::vector<int> labels;
  for (const auto& row : table.rows) labels.push_back(class_index[row[static_cast<std::size_t>(target)]]);

  const auto [train_rows, test_rows] = holdout_split(labels, holdout_fraction, split_seed);
  auto train = std::make_shared<Table>();
  train->header = table.header;
  for (auto r : train_rows) train->rows.push_back(table.rows[r]);
  Table test;
  test.header = table.header;
  for (auto r : test_rows) test.rows.push_back(table.rows[r]);

  HoldoutOutcome out;
  std::map<std::string, std::size_t> train_counts;
  for (auto r : train_rows) ++train_counts[table.rows[r][static_cast<std::size_t>(target)]];
  std::string majority;
  std::size_t most = 0;
  for (const auto& [name, n] : train_counts)
    if (n > most) {
      most = n;
      majority = name;
    }
  std::size_t hits = 0;
  for (const auto& row : test.rows) hits += row[static_cast<std::size_t>(target)] == majority ? 1 : 0;
  out.majority_accuracy = test.rows.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(test.rows.size());

  Run run(cfg, train);
  out.run = run.execute();
  if (!out.run.model_path) return out;

  const auto model = Model::load(*out.run.model_path);
  const auto proba = model.predict_proba(test);
  std::vector<int> truth;
  for (const auto& row : test.rows) {
    const auto& name = row[static_cast<std::size_t>(target)];
    const auto it = std::find(model.class_names.begin(), model.class_names.end(), name);
    if (it == model.class_names.end()) throw Error("holdout class '" + name + "' never seen in training");
    truth.push_back(static_cast<int>(it - model.class_names.begin()));
  }
  out.holdout_accuracy = score(proba, truth, Metric::accuracy);
  out.holdout_score = score(proba, truth, cfg.metric);
  return out;
}

namespace {

std::string cell_name(const json& entry, const std::string& what, std::size_t index) {
  if (entry.is_object() && entry.contains("name") && entry["name"].is_string()) return entry["name"].get<std::string>();
  return what + std::to_string(index);
}

std::string sanitize(std::string s) {
  for (auto& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
  return s;
}

}  // namespace

std::vector<BenchmarkRow> run_benchmark(const json& suite, const std::string& base_dir, std::ostream* progress) {
  std::vector<Violation> problems;
  if (!suite.is_object()) throw ConfigError(std::vector<Violation>{{"", "suite must be a JSON object"}});
  for (const char* key : {"datasets", "configs", "seeds"})
    if (!suite.contains(key) || !suite[key].is_array() || suite[key].empty())
      problems.push_back({key, "expected a non-empty array"});
  if (!suite.contains("budget") || !suite["budget"].is_object()) problems.push_back({"budget", "expected an object"});
  if (!problems.empty()) throw ConfigError(problems);

  const double holdout = suite.value("holdout_fraction", 0.25);
  const std::string out_dir = suite.value("output_dir", std::string("benchmark-out"));
  std::vector<BenchmarkRow> rows;
  for (std::size_t d = 0; d < suite["datasets"].size(); ++d) {
    const auto& dataset = suite["datasets"][d];
    for (std::size_t c = 0; c < suite["configs"].size(); ++c) {
      const auto& config = suite["configs"][c];
      for (const auto& seed_json : suite["seeds"]) {
        BenchmarkRow row;
        row.dataset = cell_name(dataset, "dataset", d);
        row.config = cell_name(config, "config", c);
        row.seed = seed_json.is_number_unsigned() ? seed_json.get<std::uint64_t>() : 0;
        const auto t0 = Clock::now();
        try {
          json doc = {{"budget", suite["budget"]}, {"seed", seed_json}};
          for (const char* key : {"n_workers", "metric", "cv_folds", "max_evaluations"})
            if (suite.contains(key)) doc[key] = suite[key];
          if (config.is_object())
            for (const auto& [k, v] : config.items())
              if (k != "name") doc[k] = v;
          doc["dataset"] = {{"path", dataset.value("path", std::string())},
                            {"target", dataset.value("target", std::string())}};
          const std::string cell = sanitize(row.dataset + "-" + row.config + "-" + std::to_string(row.seed));
          doc["output_dir"] = (std::filesystem::path(out_dir) / cell).string();
          doc["run_id"] = cell;
          const auto cfg = config_from_json(doc, base_dir);
          const auto table = read_csv(cfg.dataset_path);
          const auto outcome = run_with_holdout(cfg, table, holdout, row.seed);
          row.status = std::string(phase_name(outcome.run.phase));
          row.metric = outcome.holdout_score;
          row.message = outcome.run.message;
        } catch (const std::exception& e) {
          row.status = "failed";
          row.message = e.what();
        }
        row.duration_s = std::chrono::duration<double>(Clock::now() - t0).count();
        if (progress != nullptr)
          *progress << row.dataset << " / " << row.config << " / seed " << row.seed << ": " << row.status
                    << (row.metric ? " metric=" + json(*row.metric).dump() : std::string()) << "\n";
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
  std::string out = "dataset,config,seed,status,metric,duration_s,message\n";
  for (const auto& r : rows) {
    out += csv_escape(r.dataset) + "," + csv_escape(r.config) + "," + std::to_string(r.seed) + "," +
           csv_escape(r.status) + "," + (r.metric ? json(*r.metric).dump() : std::string()) + "," +
           json(r.duration_s).dump() + "," + csv_escape(r.message) + "\n";
  }
  return out;
}

}  // namespace pipesearch
