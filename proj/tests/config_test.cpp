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

#include <cstdlib>

#include "doctest.h"
#include "pipesearch/config.hpp"
#include "pipesearch/strategies.hpp"
#include "support.hpp"

using namespace pipesearch;
using nlohmann::json;

namespace {

json minimal() {
  return {{"dataset", {{"path", "data.csv"}, {"target", "y"}}}, {"budget", {{"total_seconds", 30}}}, {"seed", 1}};
}

std::vector<std::string> paths_of(const json& doc) {
  try {
    config_from_json(doc);
  } catch (const ConfigError& e) {
    std::vector<std::string> out;
    for (const auto& v : e.violations()) out.push_back(v.path);
    return out;
  }
  return {};
}

json with(json doc, const json::json_pointer& where, json value) {
  doc[where] = std::move(value);
  return doc;
}

}  // namespace

TEST_CASE("minimal config gets the documented defaults") {
  const auto cfg = config_from_json(minimal(), "/base");
  CHECK(cfg.dataset_path == "/base/data.csv");
  CHECK(cfg.target == "y");
  CHECK(cfg.search == "evolution");
  CHECK(cfg.post == "ensemble");
  CHECK(cfg.post_params.at("size") == 25);
  CHECK(cfg.metric == Metric::accuracy);
  CHECK(cfg.budget.total_seconds == 30.0);
  CHECK_FALSE(cfg.budget.per_eval_timeout_seconds);
  CHECK(cfg.cv_folds == 5);
  CHECK(cfg.max_evaluations == 0);
  CHECK(cfg.seed == 1);
  CHECK(cfg.n_workers >= 1);
  CHECK(cfg.output_dir == "pipesearch-out");  // the default stays relative to the working directory
  CHECK(cfg.space.components.size() == default_search_space().components.size());
}

TEST_CASE("PIPESEARCH_WORKERS sets the default worker count") {
  setenv("PIPESEARCH_WORKERS", "3", 1);
  CHECK(default_workers() == 3);
  CHECK(config_from_json(minimal()).n_workers == 3);
  setenv("PIPESEARCH_WORKERS", "zero", 1);
  CHECK(default_workers() >= 1);
  unsetenv("PIPESEARCH_WORKERS");
}

TEST_CASE("violations carry field paths") {
  using P = json::json_pointer;
  const auto base = minimal();
  CHECK(paths_of(json::array()) == std::vector<std::string>{""});
  CHECK(paths_of(json::object()) == std::vector<std::string>{"dataset", "budget", "seed"});
  CHECK(paths_of(with(base, P("/dataset/path"), 5)) == std::vector<std::string>{"dataset.path"});
  CHECK(paths_of(with(base, P("/dataset/target"), "")) == std::vector<std::string>{"dataset.target"});
  CHECK(paths_of(with(base, P("/dataset/extra"), 1)) == std::vector<std::string>{"dataset.extra"});
  CHECK(paths_of(with(base, P("/search/name"), "annealing")) == std::vector<std::string>{"search.name"});
  CHECK(paths_of(with(base, P("/search"), json{{"name", "asha"}, {"params", {{"eta", 1}}}})) ==
        std::vector<std::string>{"search.params.eta"});
  CHECK(paths_of(with(base, P("/post_processing/name"), "stacking")) == std::vector<std::string>{"post_processing.name"});
  CHECK(paths_of(with(base, P("/post_processing/params/size"), 0)) ==
        std::vector<std::string>{"post_processing.params.size"});
  CHECK(paths_of(with(with(base, P("/post_processing/name"), "best"), P("/post_processing/params/size"), 3)) ==
        std::vector<std::string>{"post_processing.params.size"});
  CHECK(paths_of(with(base, P("/metric"), "auc")) == std::vector<std::string>{"metric"});
  CHECK(paths_of(with(base, P("/format_version"), 2)) == std::vector<std::string>{"format_version"});
  CHECK(paths_of(with(base, P("/budget/total_seconds"), -1)) == std::vector<std::string>{"budget.total_seconds"});
  CHECK(paths_of(with(base, P("/budget/total_seconds"), "lots")) == std::vector<std::string>{"budget.total_seconds"});
  CHECK(paths_of(with(base, P("/budget/post_processing_fraction"), 1.0)) ==
        std::vector<std::string>{"budget.post_processing_fraction"});
  CHECK(paths_of(with(base, P("/budget/per_eval_timeout_seconds"), 0)) ==
        std::vector<std::string>{"budget.per_eval_timeout_seconds"});
  // 30 s total with the ensemble default 0.3 leaves 21 s for search
  CHECK(paths_of(with(base, P("/budget/per_eval_timeout_seconds"), 22)) ==
        std::vector<std::string>{"budget.per_eval_timeout_seconds"});
  CHECK(paths_of(with(base, P("/budget/per_eval_timeout_seconds"), 21)).empty());
  CHECK(paths_of(with(base, P("/seed"), -4)) == std::vector<std::string>{"seed"});
  CHECK(paths_of(with(base, P("/seed"), 1.5)) == std::vector<std::string>{"seed"});
  CHECK(paths_of(with(base, P("/n_workers"), 0)) == std::vector<std::string>{"n_workers"});
  CHECK(paths_of(with(base, P("/cv_folds"), 1)) == std::vector<std::string>{"cv_folds"});
  CHECK(paths_of(with(base, P("/max_evaluations"), -1)) == std::vector<std::string>{"max_evaluations"});
  CHECK(paths_of(with(base, P("/run_id"), "has space")) == std::vector<std::string>{"run_id"});
  CHECK(paths_of(with(base, P("/run_id"), std::string(65, 'a'))) == std::vector<std::string>{"run_id"});
  CHECK(paths_of(with(base, P("/colour"), "red")) == std::vector<std::string>{"colour"});

  // several problems are reported together
  auto many = with(with(base, P("/metric"), "auc"), P("/cv_folds"), 0);
  CHECK(paths_of(many) == std::vector<std::string>{"metric", "cv_folds"});
}

TEST_CASE("search spaces inline or from a file") {
  const auto space_text = testsupport::read_text(testsupport::fixture("reference_space.json"));
  auto doc = minimal();
  doc["search_space"] = json::parse(space_text);
  const auto inline_cfg = config_from_json(doc);
  CHECK(inline_cfg.space.max_pipeline_length == 3);

  const auto dir = testsupport::scratch_dir("config-space");
  testsupport::write_text(dir / "space.json", space_text);
  auto file_doc = minimal();
  file_doc["search_space_file"] = "space.json";
  const auto file_cfg = config_from_json(file_doc, dir.string());
  CHECK(file_cfg.space.components.size() == inline_cfg.space.components.size());

  auto both = doc;
  both["search_space_file"] = "space.json";
  CHECK(paths_of(both) == std::vector<std::string>{"search_space_file"});
  auto missing = minimal();
  missing["search_space_file"] = (dir / "nope.json").string();
  CHECK(paths_of(missing) == std::vector<std::string>{"search_space_file"});

  auto unknown = json::parse(space_text);
  unknown["components"].push_back({{"id", "quantum-forest"}, {"role", "estimator"}, {"hyperparams", json::object()}});
  auto bad = minimal();
  bad["search_space"] = unknown;
  const auto p = paths_of(bad);
  REQUIRE_FALSE(p.empty());
  CHECK(p[0].rfind("search_space", 0) == 0);
}

TEST_CASE("load_config resolves paths against the config file") {
  const auto dir = testsupport::scratch_dir("config-load");
  testsupport::write_text(dir / "run.json", minimal().dump());
  const auto cfg = load_config((dir / "run.json").string());
  CHECK(cfg.dataset_path == (dir / "data.csv").string());
  testsupport::write_text(dir / "broken.json", "{");
  CHECK_THROWS_AS(load_config((dir / "broken.json").string()), ConfigError);
  CHECK_THROWS(load_config((dir / "absent.json").string()));
}

TEST_CASE("config_to_json round-trips") {
  auto doc = minimal();
  doc["search"] = {{"name", "asha"}, {"params", {{"eta", 4}}}};
  doc["metric"] = "macro_f1";
  doc["budget"]["post_processing_fraction"] = 0.2;
  doc["run_id"] = "abc_1";
  doc["n_workers"] = 2;
  const auto cfg = config_from_json(doc);
  const auto again = config_from_json(config_to_json(cfg));
  CHECK(config_to_json(again) == config_to_json(cfg));
  CHECK(again.search_params.at("eta") == 4);
  CHECK(again.run_id == "abc_1");
}

TEST_CASE("schema lists every field") {
  const auto schema = config_schema();
  for (const char* f : {"dataset.path", "dataset.target", "search.name", "budget.total_seconds", "seed", "metric"})
    CHECK(schema.at("fields").contains(f));
}
