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

#include "pipesearch/server.hpp"

#include <cstdlib>
#include <filesystem>

#include "httplib.h"

namespace pipesearch {

using nlohmann::json;

RunManager::RunManager(std::size_t max_active, std::string base_dir)
    : max_active_(std::max<std::size_t>(1, max_active)), base_dir_(std::move(base_dir)) {}

RunManager::~RunManager() {
  std::lock_guard lock(mu_);
  for (auto& [id, e] : runs_) e.run->stop();
  for (auto& [id, e] : runs_)
    if (e.worker.joinable()) e.worker.join();
}

std::shared_ptr<Run> RunManager::start(const json& config) {
  auto cfg = config_from_json(config, base_dir_);
  std::lock_guard lock(mu_);
  if (!cfg.run_id.empty() && runs_.contains(cfg.run_id))
    throw ConfigError(std::vector<Violation>{{"run_id", "run '" + cfg.run_id + "' already exists"}});
  std::size_t active = 0;
  for (const auto& [id, e] : runs_) active += e.run->finished() ? 0 : 1;
  if (active >= max_active_)
    throw TooManyRuns("concurrent run limit reached (" + std::to_string(max_active_) + ")");
  if (cfg.run_id.empty()) {
    do cfg.run_id = new_run_id();
    while (runs_.contains(cfg.run_id));
  }
  auto run = std::make_shared<Run>(std::move(cfg));
  Entry entry{run, std::thread([run] { run->execute(); })};
  order_.push_back(run->run_id());
  runs_.emplace(run->run_id(), std::move(entry));
  return run;
}

std::shared_ptr<Run> RunManager::get(const std::string& run_id) const {
  std::lock_guard lock(mu_);
  const auto it = runs_.find(run_id);
  if (it == runs_.end()) throw UnknownRun("no run with id '" + run_id + "'");
  return it->second.run;
}

std::vector<std::shared_ptr<Run>> RunManager::list() const {
  std::lock_guard lock(mu_);
  std::vector<std::shared_ptr<Run>> out;
  for (const auto& id : order_) out.push_back(runs_.at(id).run);
  return out;
}

void RunManager::stop(const std::string& run_id) { get(run_id)->stop(); }

std::size_t RunManager::active() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [id, e] : runs_) n += e.run->finished() ? 0 : 1;
  return n;
}

int default_port() {
  if (const char* env = std::getenv("PIPESEARCH_PORT")) {
    char* end = nullptr;
    const long p = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && p > 0 && p < 65536) return static_cast<int>(p);
  }
  return 8351;
}

namespace {

void send(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                const std::string& field = "") {
  json body = {{"code", code}, {"message", message}};
  if (!field.empty()) body["field"] = field;
  send(res, status, body);
}

json run_json(const Run& run) {
  auto j = run.status().to_json();
  j["log_path"] = run.log_path().string();
  j["search"] = run.config().search;
  j["post_processing"] = run.config().post;
  return j;
}

std::optional<double> number_param(const httplib::Request& req, const std::string& name) {
  if (!req.has_param(name)) return std::nullopt;
  const auto text = req.get_param_value(name);
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0' || !(v >= 0.0)) throw ConfigError(std::vector<Violation>{{name, "expected a non-negative number"}});
  return v;
}

}  // namespace

ControlServer::ControlServer(RunManager& runs) : runs_(runs), server_(std::make_unique<httplib::Server>()) {
  routes();
}

ControlServer::~ControlServer() { stop(); }

int ControlServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

void ControlServer::serve() { server_->listen_after_bind(); }

void ControlServer::stop() {
  if (server_) server_->stop();
}

void ControlServer::routes() {
  auto& s = *server_;
  const std::string id = "([A-Za-z0-9_-]+)";

  s.Get("/api/v1/schema", [](const httplib::Request&, httplib::Response& res) { send(res, 200, config_schema()); });

  s.Post("/api/v1/runs", [this](const httplib::Request& req, httplib::Response& res) {
    json doc;
    try {
      doc = json::parse(req.body);
    } catch (const json::exception& e) {
      send_error(res, 400, "invalid_json", e.what());
      return;
    }
    try {
      auto run = runs_.start(doc);
      send(res, 201, run_json(*run));
    } catch (const ConfigError& e) {
      json errors = json::array();
      for (const auto& v : e.violations()) errors.push_back({{"field", v.path}, {"message", v.message}});
      json body = {{"code", "invalid_config"}, {"message", e.what()}, {"errors", errors}};
      if (!e.violations().empty()) body["field"] = e.violations().front().path;
      send(res, 400, body);
    } catch (const TooManyRuns& e) {
      send_error(res, 429, "too_many_runs", e.what());
    }
  });

  s.Get("/api/v1/runs", [this](const httplib::Request&, httplib::Response& res) {
    json runs = json::array();
    for (const auto& r : runs_.list()) runs.push_back(run_json(*r));
    send(res, 200, {{"runs", runs}, {"max_active", runs_.max_active()}});
  });

  s.Get("/api/v1/runs/" + id, [this](const httplib::Request& req, httplib::Response& res) {
    try {
      send(res, 200, run_json(*runs_.get(req.matches[1])));
    } catch (const UnknownRun& e) {
      send_error(res, 404, "not_found", e.what());
    }
  });

  s.Get("/api/v1/runs/" + id + "/evaluations", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      auto run = runs_.get(req.matches[1]);
      const auto since = static_cast<std::size_t>(number_param(req, "since").value_or(0.0));
      const double wait = std::min(30.0, number_param(req, "timeout").value_or(10.0));
      const auto batch = run->records_since(since, std::chrono::milliseconds(static_cast<long>(wait * 1000)));
      json records = json::array();
      for (const auto& r : batch) records.push_back({{"seq", r.seq}, {"record", record_to_json(r.record)}});
      const auto status = run->status();
      send(res, 200,
           {{"run_id", run->run_id()},
            {"records", records},
            {"next", batch.empty() ? since : batch.back().seq},
            {"phase", std::string(phase_name(status.phase))},
            {"finished", run->finished()}});
    } catch (const UnknownRun& e) {
      send_error(res, 404, "not_found", e.what());
    } catch (const ConfigError& e) {
      send_error(res, 400, "invalid_parameter", e.what(), e.violations().front().path);
    }
  });

  s.Post("/api/v1/runs/" + id + "/stop", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      auto run = runs_.get(req.matches[1]);
      run->stop();
      send(res, 202, {{"run_id", run->run_id()}, {"phase", std::string(phase_name(run->status().phase))}});
    } catch (const UnknownRun& e) {
      send_error(res, 404, "not_found", e.what());
    }
  });

  s.Get("/api/v1/report", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      std::vector<std::filesystem::path> paths;
      std::string ids = req.get_param_value("run_ids");
      std::size_t pos = 0;
      while (pos <= ids.size() && !ids.empty()) {
        const auto comma = ids.find(',', pos);
        const auto one = ids.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!one.empty()) paths.push_back(runs_.get(one)->log_path());
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      if (paths.empty()) {
        send_error(res, 400, "invalid_parameter", "run_ids must name at least one run", "run_ids");
        return;
      }
      const auto report = compare_runs(paths);
      if (req.get_param_value("format") == "csv") {
        res.status = 200;
        res.set_content(report.plot_csv(), "text/csv");
      } else {
        send(res, 200, report.to_json());
      }
    } catch (const UnknownRun& e) {
      send_error(res, 404, "not_found", e.what());
    } catch (const LogError& e) {
      send_error(res, 500, "log_error", e.what());
    }
  });

  s.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (res.body.empty()) {
      json body = {{"code", res.status == 404 ? "not_found" : "http_error"},
                   {"message", res.status == 404 ? "no such endpoint" : "request failed"}};
      res.set_content(body.dump(), "application/json");
    }
  });
  s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string message = "internal error";
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      message = e.what();
    } catch (...) {
    }
    send_error(res, 500, "internal", message);
  });
}

}  // namespace pipesearch
