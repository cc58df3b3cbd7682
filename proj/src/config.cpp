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

#include "pipesearch/config.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <thread>

#include "pipesearch/learners.hpp"
#include "pipesearch/strategies.hpp"

namespace pipesearch {

using nlohmann::json;

namespace {

class Checker {
 public:
  std::vector<Violation> violations;

  void fail(const std::string& path, const std::string& message) { violations.push_back({path, message}); }

  void only_keys(const json& obj, const std::string& prefix, const std::set<std::string>& keys) {
    for (const auto& [k, v] : obj.items())
      if (!keys.contains(k)) fail(prefix.empty() ? k : prefix + "." + k, "unknown field");
  }

  const json* object(const json& parent, const std::string& key, const std::string& path, bool required) {
    if (!parent.contains(key)) {
      if (required) fail(path, "required");
      return nullptr;
    }
    if (!parent[key].is_object()) {
      fail(path, "expected an object");
      return nullptr;
    }
    return &parent[key];
  }

  std::optional<std::string> string(const json& parent, const std::string& key, const std::string& path,
                                    bool required) {
    if (!parent.contains(key)) {
      if (required) fail(path, "required");
      return std::nullopt;
    }
    if (!parent[key].is_string() || parent[key].get<std::string>().empty()) {
      fail(path, "expected a non-empty string");
      return std::nullopt;
    }
    return parent[key].get<std::string>();
  }

  std::optional<double> number(const json& parent, const std::string& key, const std::string& path, bool required) {
    if (!parent.contains(key)) {
      if (required) fail(path, "required");
      return std::nullopt;
    }
    if (!parent[key].is_number()) {
      fail(path, "expected a number");
      return std::nullopt;
    }
    return parent[key].get<double>();
  }

  std::optional<std::uint64_t> count(const json& parent, const std::string& key, const std::string& path,
                                     bool required, std::uint64_t min) {
    if (!parent.contains(key)) {
      if (required) fail(path, "required");
      return std::nullopt;
    }
    const auto& v = parent[key];
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      fail(path, "expected a non-negative integer");
      return std::nullopt;
    }
    const auto n = v.get<std::uint64_t>();
    if (n < min) {
      fail(path, "must be >= " + std::to_string(min));
      return std::nullopt;
    }
    return n;
  }
};

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
  return out;
}

std::string resolve(const std::string& path, const std::string& base_dir) {
  if (base_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base_dir) / path).string();
}

bool valid_run_id(const std::string& id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
  return true;
}

}  // namespace

std::size_t default_workers() {
  if (const char* env = std::getenv("PIPESEARCH_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<std::size_t>(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<std::string> post_processor_names() { return {"best", "ensemble"}; }

RunConfig config_from_json(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw ConfigError(std::vector<Violation>{{"", "config must be a JSON object"}});
  Checker c;
  RunConfig cfg;
  c.only_keys(doc, "",
              {"format_version", "dataset", "search", "post_processing", "metric", "budget", "seed", "n_workers",
               "cv_folds", "max_evaluations", "search_space", "search_space_file", "output_dir", "run_id"});

  if (doc.contains("format_version") && doc["format_version"] != kConfigFormatVersion)
    c.fail("format_version", "unsupported version (expected " + std::to_string(kConfigFormatVersion) + ")");

  if (const json* ds = c.object(doc, "dataset", "dataset", true)) {
    c.only_keys(*ds, "dataset", {"path", "target"});
    if (auto p = c.string(*ds, "path", "dataset.path", true)) cfg.dataset_path = resolve(*p, base_dir);
    if (auto t = c.string(*ds, "target", "dataset.target", true)) cfg.target = *t;
  }

  bool search_ok = true;
  if (const json* s = c.object(doc, "search", "search", false)) {
    c.only_keys(*s, "search", {"name", "params"});
    if (s->contains("name")) {
      if (auto n = c.string(*s, "name", "search.name", false)) cfg.search = *n;
      else search_ok = false;
    }
    if (s->contains("params")) cfg.search_params = (*s)["params"];
  } else if (doc.contains("search")) {
    search_ok = false;
  }

  if (const json* p = c.object(doc, "post_processing", "post_processing", false)) {
    c.only_keys(*p, "post_processing", {"name", "params"});
    if (auto n = c.string(*p, "name", "post_processing.name", false)) cfg.post = *n;
    if (p->contains("params")) cfg.post_params = (*p)["params"];
  }
  const auto posts = post_processor_names();
  if (std::find(posts.begin(), posts.end(), cfg.post) == posts.end()) {
    c.fail("post_processing.name", "unknown post-processor '" + cfg.post + "' (available: " + join(posts) + ")");
  } else if (!cfg.post_params.is_object()) {
    c.fail("post_processing.params", "expected an object");
  } else if (cfg.post == "ensemble") {
    c.only_keys(cfg.post_params, "post_processing.params", {"size"});
    if (!cfg.post_params.contains("size")) cfg.post_params["size"] = 25;
    c.count(cfg.post_params, "size", "post_processing.params.size", false, 1);
  } else {
    c.only_keys(cfg.post_params, "post_processing.params", {});
  }

  if (auto m = c.string(doc, "metric", "metric", false)) {
    try {
      cfg.metric = metric_from_name(*m);
    } catch (const Error&) {
      c.fail("metric", "unknown metric '" + *m + "' (available: accuracy, neg_log_loss, macro_f1)");
    }
  }

  if (const json* b = c.object(doc, "budget", "budget", true)) {
    c.only_keys(*b, "budget", {"total_seconds", "per_eval_timeout_seconds", "post_processing_fraction"});
    auto total = c.number(*b, "total_seconds", "budget.total_seconds", true);
    if (total && !(*total > 0.0)) {
      c.fail("budget.total_seconds", "must be > 0");
      total.reset();
    }
    const bool total_ok = total.has_value();
    if (total_ok) cfg.budget.total_seconds = *total;
    auto frac = c.number(*b, "post_processing_fraction", "budget.post_processing_fraction", false);
    if (frac && !(*frac > 0.0 && *frac < 1.0)) {
      c.fail("budget.post_processing_fraction", "must be in (0, 1)");
      frac.reset();
    }
    cfg.budget.post_processing_fraction = frac;
    auto per = c.number(*b, "per_eval_timeout_seconds", "budget.per_eval_timeout_seconds", false);
    if (per) {
      const double f = frac.value_or(cfg.post == "best" ? 0.1 : 0.3);
      if (!(*per > 0.0)) c.fail("budget.per_eval_timeout_seconds", "must be > 0");
      else if (total_ok && *per > cfg.budget.total_seconds * (1.0 - f))
        c.fail("budget.per_eval_timeout_seconds", "must not exceed the search share of the budget");
      else cfg.budget.per_eval_timeout_seconds = per;
    }
  }

  if (auto seed = c.count(doc, "seed", "seed", true, 0)) cfg.seed = *seed;
  if (auto n = c.count(doc, "n_workers", "n_workers", false, 1)) cfg.n_workers = *n;
  else if (!doc.contains("n_workers")) cfg.n_workers = default_workers();
  if (auto k = c.count(doc, "cv_folds", "cv_folds", false, 2)) cfg.cv_folds = *k;
  if (auto m = c.count(doc, "max_evaluations", "max_evaluations", false, 0)) cfg.max_evaluations = *m;
  if (auto o = c.string(doc, "output_dir", "output_dir", false)) cfg.output_dir = resolve(*o, base_dir);
  if (auto r = c.string(doc, "run_id", "run_id", false)) {
    if (valid_run_id(*r)) cfg.run_id = *r;
    else c.fail("run_id", "use 1-64 characters from [A-Za-z0-9_-]");
  }

  bool space_ok = true;
  if (doc.contains("search_space") && doc.contains("search_space_file")) {
    c.fail("search_space_file", "give either search_space or search_space_file, not both");
    space_ok = false;
  } else {
    std::optional<json> space_doc;
    std::string space_path = "search_space";
    if (doc.contains("search_space")) {
      space_doc = doc["search_space"];
    } else if (auto f = c.string(doc, "search_space_file", "search_space_file", false)) {
      cfg.search_space_file = resolve(*f, base_dir);
      space_path = "search_space_file";
      std::ifstream in(*cfg.search_space_file);
      try {
        if (!in) throw Error("cannot open " + *cfg.search_space_file);
        space_doc = json::parse(in);
      } catch (const std::exception& e) {
        c.fail(space_path, e.what());
        space_ok = false;
      }
    } else if (doc.contains("search_space_file")) {
      space_ok = false;
    }
    if (space_doc) {
      try {
        cfg.space = space_from_json(*space_doc);
        for (const auto& v : validate_space(cfg.space)) {
          c.fail(space_path + (v.path.empty() ? "" : "." + v.path), v.message);
          space_ok = false;
        }
        for (const auto& comp : cfg.space.components)
          if (!has_component(comp.id)) {
            c.fail(space_path + ".components", "no implementation for component '" + comp.id + "'");
            space_ok = false;
          }
      } catch (const Error& e) {
        c.fail(space_path, e.what());
        space_ok = false;
      }
    } else if (space_ok) {
      cfg.space = default_search_space();
    }
  }

  if (search_ok && space_ok) {
    try {
      make_strategy(cfg.search, cfg.search_params, cfg.space);
    } catch (const ConfigError& e) {
      for (const auto& v : e.violations()) c.violations.push_back(v);
    } catch (const Error& e) {
      c.fail("search", e.what());
    }
  }

  if (!c.violations.empty()) throw ConfigError(c.violations);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::vector<Violation>{{"", std::string("not valid JSON: ") + e.what()}});
  }
  return config_from_json(doc, std::filesystem::path(path).parent_path().string());
}

json config_to_json(const RunConfig& cfg) {
  json budget = {{"total_seconds", cfg.budget.total_seconds}};
  if (cfg.budget.per_eval_timeout_seconds) budget["per_eval_timeout_seconds"] = *cfg.budget.per_eval_timeout_seconds;
  if (cfg.budget.post_processing_fraction) budget["post_processing_fraction"] = *cfg.budget.post_processing_fraction;
  json doc = {{"format_version", kConfigFormatVersion},
              {"dataset", {{"path", cfg.dataset_path}, {"target", cfg.target}}},
              {"search", {{"name", cfg.search}, {"params", cfg.search_params}}},
              {"post_processing", {{"name", cfg.post}, {"params", cfg.post_params}}},
              {"metric", std::string(metric_name(cfg.metric))},
              {"budget", budget},
              {"seed", cfg.seed},
              {"n_workers", cfg.n_workers},
              {"cv_folds", cfg.cv_folds},
              {"max_evaluations", cfg.max_evaluations},
              {"output_dir", cfg.output_dir},
              {"search_space", space_to_json(cfg.space)}};
  if (!cfg.run_id.empty()) doc["run_id"] = cfg.run_id;
  return doc;
}

json config_schema() {
  auto field = [](std::string type, bool required, std::string description) {
    return json{{"type", std::move(type)}, {"required", required}, {"description", std::move(description)}};
  };
  json strategies = json::array();
  for (const auto& s : strategy_names()) strategies.push_back(s);
  return {
      {"format_version", kConfigFormatVersion},
      {"fields",
       {{"format_version", field("integer", false, "config format version, currently 1")},
        {"dataset.path", field("string", true, "CSV file readable by the server")},
        {"dataset.target", field("string", true, "name of the label column")},
        {"search.name", field("string", false, "search strategy (default evolution)")},
        {"search.params", field("object", false, "strategy parameters")},
        {"post_processing.name", field("string", false, "best or ensemble (default ensemble)")},
        {"post_processing.params.size", field("integer", false, "ensemble size, >= 1 (default 25)")},
        {"metric", field("string", false, "accuracy, neg_log_loss or macro_f1 (default accuracy)")},
        {"budget.total_seconds", field("number", true, "wall-clock budget for the whole run, > 0")},
        {"budget.per_eval_timeout_seconds", field("number", false, "per-evaluation timeout (default 10% of total)")},
        {"budget.post_processing_fraction",
         field("number", false, "share of the budget reserved for post-processing, in (0, 1)")},
        {"seed", field("integer", true, "random seed, >= 0")},
        {"n_workers", field("integer", false, "parallel evaluations, >= 1")},
        {"cv_folds", field("integer", false, "cross-validation folds, >= 2 (default 5)")},
        {"max_evaluations", field("integer", false, "stop searching after this many evaluations (0 = no cap)")},
        {"search_space", field("object", false, "inline search space (default built-in space)")},
        {"search_space_file", field("string", false, "path to a search space JSON file")},
        {"output_dir", field("string", false, "directory for logs, model and summary")},
        {"run_id", field("string", false, "[A-Za-z0-9_-]{1,64}; assigned when omitted")}}},
      {"strategies", strategies},
      {"post_processors", post_processor_names()},
      {"metrics", {"accuracy", "neg_log_loss", "macro_f1"}}};
}

}  // namespace pipesearch
