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

#include "pipesearch/cli.hpp"

#include <algorithm>
#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "pipesearch/benchmark.hpp"
#include "pipesearch/config.hpp"
#include "pipesearch/orchestrator.hpp"
#include "pipesearch/postprocess.hpp"
#include "pipesearch/runlog.hpp"
#include "pipesearch/server.hpp"
#include "pipesearch/strategies.hpp"

namespace pipesearch {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_interrupt(int) { g_interrupted.store(true); }

// Calls `action` once SIGINT/SIGTERM arrives, until destroyed.
class InterruptWatch {
 public:
  explicit InterruptWatch(std::function<void()> action) : action_(std::move(action)) {
    g_interrupted.store(false);
    prev_int_ = std::signal(SIGINT, on_interrupt);
    prev_term_ = std::signal(SIGTERM, on_interrupt);
    thread_ = std::thread([this] {
      while (!done_.load()) {
        if (g_interrupted.exchange(false)) action_();
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
      }
    });
  }
  ~InterruptWatch() {
    done_.store(true);
    thread_.join();
    std::signal(SIGINT, prev_int_);
    std::signal(SIGTERM, prev_term_);
  }

 private:
  std::function<void()> action_;
  std::atomic<bool> done_{false};
  std::thread thread_;
  void (*prev_int_)(int) = nullptr;
  void (*prev_term_)(int) = nullptr;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error("cannot write " + path.string());
}

void print_violations(const ConfigError& e, std::ostream& err) {
  err << "error: invalid configuration\n";
  for (const auto& v : e.violations()) err << "  " << (v.path.empty() ? "(root)" : v.path) << ": " << v.message << "\n";
}

// Makes the path-valued fields of a config file absolute relative to it.
void anchor_paths(json& doc, const fs::path& dir) {
  auto fix = [&](json& node, const char* key) {
    if (node.is_object() && node.contains(key) && node[key].is_string()) {
      const fs::path p = node[key].get<std::string>();
      if (p.is_relative()) node[key] = (dir / p).string();
    }
  };
  if (doc.contains("dataset")) fix(doc["dataset"], "path");
  fix(doc, "search_space_file");
  fix(doc, "output_dir");
}

struct FitOptions {
  std::string data;
  std::string config;
  std::optional<std::string> target, search, search_params, post, metric, output_dir, search_space, run_id;
  std::optional<double> time, per_eval_timeout, post_fraction;
  std::optional<std::uint64_t> seed, workers, max_evaluations, cv_folds, ensemble_size;
};

int cmd_fit(const FitOptions& o, std::ostream& out, std::ostream& err) {
  json doc = json::object();
  if (!o.config.empty()) {
    try {
      doc = json::parse(read_file(o.config));
    } catch (const json::exception& e) {
      err << "error: " << o.config << " is not valid JSON: " << e.what() << "\n";
      return 2;
    }
    anchor_paths(doc, fs::path(o.config).parent_path());
  }
  if (!o.data.empty()) doc["dataset"]["path"] = o.data;
  if (o.target) doc["dataset"]["target"] = *o.target;
  if (o.time) doc["budget"]["total_seconds"] = *o.time;
  if (!doc.contains("budget")) doc["budget"]["total_seconds"] = 60.0;
  if (o.per_eval_timeout) doc["budget"]["per_eval_timeout_seconds"] = *o.per_eval_timeout;
  if (o.post_fraction) doc["budget"]["post_processing_fraction"] = *o.post_fraction;
  if (o.search) doc["search"]["name"] = *o.search;
  if (o.search_params) {
    try {
      doc["search"]["params"] = json::parse(*o.search_params);
    } catch (const json::exception& e) {
      err << "error: --search-params is not valid JSON: " << e.what() << "\n";
      return 2;
    }
  }
  if (o.post) doc["post_processing"]["name"] = *o.post;
  if (o.ensemble_size) doc["post_processing"]["params"]["size"] = *o.ensemble_size;
  if (o.metric) doc["metric"] = *o.metric;
  if (o.seed) doc["seed"] = *o.seed;
  if (!doc.contains("seed")) doc["seed"] = 0;
  if (o.workers) doc["n_workers"] = *o.workers;
  if (o.max_evaluations) doc["max_evaluations"] = *o.max_evaluations;
  if (o.cv_folds) doc["cv_folds"] = *o.cv_folds;
  if (o.output_dir) doc["output_dir"] = *o.output_dir;
  if (o.search_space) {
    doc.erase("search_space");
    doc["search_space_file"] = *o.search_space;
  }
  if (o.run_id) doc["run_id"] = *o.run_id;

  RunConfig cfg;
  try {
    cfg = config_from_json(doc);
  } catch (const ConfigError& e) {
    print_violations(e, err);
    return 2;
  }

  Run run(cfg);
  RunResult result;
  {
    InterruptWatch watch([&run] { run.stop(); });
    result = run.execute();
  }
  const auto& s = result.summary;
  out << "run " << result.run_id << ": " << phase_name(result.phase) << "\n";
  if (s.contains("best_pipeline")) out << "best pipeline: " << s["best_pipeline"].get<std::string>() << "\n";
  if (s.contains("validation_score"))
    out << "validation " << metric_name(cfg.metric) << " (" << cfg.post << "): " << s["validation_score"].dump() << "\n";
  out << "evaluations: " << s.value("n_evaluations", 0) << " (ok " << s.value("n_ok", 0) << ", timeout "
      << s.value("n_timeout", 0) << ", error " << s.value("n_error", 0) << ", cached " << s.value("n_cached", 0)
      << ")\n";
  out << "log: " << result.log_path.string() << "\n";
  if (result.model_path) out << "model: " << result.model_path->string() << "\n";
  out << "summary: " << result.summary_path.string() << "\n";
  if (result.phase == Phase::done || (result.phase == Phase::stopped && result.model_path)) return 0;
  err << "error: " << result.message << "\n";
  return 1;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, const std::string& out_path,
                std::ostream& out, std::ostream& err) {
  try {
    const auto model = Model::load(model_path);
    if (!fs::exists(data_path)) throw Error("cannot open " + data_path);
    std::string text;
    if (fs::file_size(data_path) > 0) {
      const auto table = read_csv(data_path);
      const auto proba = model.predict_proba(table);
      text = "row_id,prediction";
      for (const auto& c : model.class_names) text += "," + csv_escape("proba_" + c);
      text += "\n";
      for (std::size_t r = 0; r < proba.rows(); ++r) {
        const auto row = proba.row(r);
        text += std::to_string(r) + "," + csv_escape(model.class_names[argmax(row)]);
        for (double p : row) text += "," + json(p).dump();
        text += "\n";
      }
    }
    if (out_path.empty() || out_path == "-") out << text;
    else write_file(out_path, text);
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_report(const std::vector<std::string>& logs, const std::string& out_dir, std::ostream& out,
               std::ostream& err) {
  try {
    const std::vector<fs::path> paths(logs.begin(), logs.end());
    const auto report = compare_runs(paths);
    write_file(fs::path(out_dir) / "report.json", report.to_json().dump(2) + "\n");
    write_file(fs::path(out_dir) / "plot.csv", report.plot_csv());
    for (const auto& r : report.runs) {
      out << r.run_id << ": " << r.n_evaluations << " evaluations, " << r.n_ok << " ok, error rate "
          << json(r.error_rate).dump() << ", best "
          << (r.final_objectives ? json((*r.final_objectives)[0]).dump() : std::string("n/a")) << "\n";
    }
    out << "wrote " << (fs::path(out_dir) / "report.json").string() << " and "
        << (fs::path(out_dir) / "plot.csv").string() << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_benchmark(const std::string& suite_path, const std::string& out_path, std::ostream& out,
                  std::ostream& err) {
  json suite;
  try {
    suite = json::parse(read_file(suite_path));
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  try {
    const auto rows = run_benchmark(suite, fs::path(suite_path).parent_path().string(), &out);
    const fs::path dest =
        out_path.empty() ? fs::path(suite.value("output_dir", std::string("benchmark-out"))) / "results.csv"
                         : fs::path(out_path);
    write_file(dest, benchmark_csv(rows));
    out << "wrote " << rows.size() << " rows to " << dest.string() << "\n";
    return 0;
  } catch (const ConfigError& e) {
    print_violations(e, err);
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_serve(const std::string& host, int port, std::size_t max_runs, std::ostream& out, std::ostream& err) {
  RunManager runs(max_runs);
  ControlServer server(runs);
  const int bound = server.bind(host, port);
  if (bound < 0) {
    err << "error: cannot listen on " << host << ":" << port << "\n";
    return 1;
  }
  out << "listening on http://" << host << ":" << bound << "/api/v1\n" << std::flush;
  InterruptWatch watch([&server] { server.stop(); });
  server.serve();
  return 0;
}

int cmd_lineage(const std::string& log_path, const std::string& eval_id, std::ostream& out, std::ostream& err) {
  try {
    const auto log = parse_log(log_path);
    for (const auto& w : log.warnings) err << "warning: " << w << "\n";
    out << lineage_to_json(lineage(log.records, eval_id)).dump(2) << "\n";
    return 0;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"pipesearch: time-budgeted search over machine-learning pipelines", "pipesearch"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::string strategies;
  for (const auto& n : strategy_names()) strategies += (strategies.empty() ? "" : ", ") + n;

  FitOptions fit;
  auto* fit_cmd = app.add_subcommand("fit", "search for a pipeline and build a model");
  fit_cmd->add_option("data", fit.data, "training CSV");
  fit_cmd->add_option("--config", fit.config, "run config JSON; flags override its fields");
  fit_cmd->add_option("--target", fit.target, "label column");
  fit_cmd->add_option("--time", fit.time, "total budget in seconds (default 60)");
  fit_cmd->add_option("--search", fit.search, "search strategy: " + strategies);
  fit_cmd->add_option("--search-params", fit.search_params, "strategy parameters as JSON");
  fit_cmd->add_option("--post", fit.post, "post-processing: best, ensemble");
  fit_cmd->add_option("--ensemble-size", fit.ensemble_size, "ensemble selections");
  fit_cmd->add_option("--metric", fit.metric, "accuracy, neg_log_loss, macro_f1");
  fit_cmd->add_option("--seed", fit.seed, "random seed (default 0)");
  fit_cmd->add_option("--workers", fit.workers, "parallel evaluations (default: PIPESEARCH_WORKERS or cores)");
  fit_cmd->add_option("--per-eval-timeout", fit.per_eval_timeout, "seconds per evaluation");
  fit_cmd->add_option("--post-fraction", fit.post_fraction, "budget share for post-processing");
  fit_cmd->add_option("--max-evaluations", fit.max_evaluations, "cap on evaluations");
  fit_cmd->add_option("--cv-folds", fit.cv_folds, "cross-validation folds");
  fit_cmd->add_option("--search-space", fit.search_space, "search space JSON file");
  fit_cmd->add_option("--output-dir", fit.output_dir, "directory for log, model and summary");
  fit_cmd->add_option("--run-id", fit.run_id, "run identifier");

  std::string model_path, data_path, predict_out;
  auto* predict_cmd = app.add_subcommand("predict", "write class predictions for a CSV");
  predict_cmd->add_option("model", model_path, "model file")->required();
  predict_cmd->add_option("data", data_path, "CSV with the training feature columns")->required();
  predict_cmd->add_option("-o,--out", predict_out, "output CSV (default stdout)");

  std::vector<std::string> logs;
  std::string report_out = ".";
  auto* report_cmd = app.add_subcommand("report", "compare run logs");
  report_cmd->add_option("logs", logs, "run logs")->required();
  report_cmd->add_option("-o,--out", report_out, "directory for report.json and plot.csv");

  std::string suite_path, bench_out;
  auto* bench_cmd = app.add_subcommand("benchmark", "run a benchmark suite");
  bench_cmd->add_option("suite", suite_path, "suite JSON")->required();
  bench_cmd->add_option("-o,--out", bench_out, "results CSV");

  std::string host = "127.0.0.1";
  int port = default_port();
  std::size_t max_runs = 2;
  auto* serve_cmd = app.add_subcommand("serve", "serve the HTTP control API");
  serve_cmd->add_option("--host", host, "bind address");
  serve_cmd->add_option("--port", port, "port (default: PIPESEARCH_PORT or 8351)")->check(CLI::Range(0, 65535));
  serve_cmd->add_option("--max-runs", max_runs, "concurrent run limit")->check(CLI::PositiveNumber);

  std::string lineage_log, lineage_id;
  auto* lineage_cmd = app.add_subcommand("lineage", "print the ancestry of an evaluation");
  lineage_cmd->add_option("log", lineage_log, "run log")->required();
  lineage_cmd->add_option("eval_id", lineage_id, "evaluation id")->required();

  auto* schema_cmd = app.add_subcommand("schema", "print the run config schema");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  if (fit_cmd->parsed()) return cmd_fit(fit, out, err);
  if (predict_cmd->parsed()) return cmd_predict(model_path, data_path, predict_out, out, err);
  if (report_cmd->parsed()) return cmd_report(logs, report_out, out, err);
  if (bench_cmd->parsed()) return cmd_benchmark(suite_path, bench_out, out, err);
  if (serve_cmd->parsed()) return cmd_serve(host, port, max_runs, out, err);
  if (lineage_cmd->parsed()) return cmd_lineage(lineage_log, lineage_id, out, err);
  if (schema_cmd->parsed()) {
    out << config_schema().dump(2) << "\n";
    return 0;
  }
  return 2;
}

}  // namespace pipesearch
