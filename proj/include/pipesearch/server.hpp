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

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "pipesearch/orchestrator.hpp"

namespace httplib {
class Server;
}

namespace pipesearch {

class TooManyRuns : public Error {
 public:
  using Error::Error;
};

class UnknownRun : public Error {
 public:
  using Error::Error;
};

// Owns the runs started through the API. Each run executes on its own thread.
class RunManager {
 public:
  explicit RunManager(std::size_t max_active = 2, std::string base_dir = "");
  ~RunManager();
  RunManager(const RunManager&) = delete;
  RunManager& operator=(const RunManager&) = delete;

  // Validates and starts a run. Throws ConfigError, or TooManyRuns when
  // max_active runs are still going.
  std::shared_ptr<Run> start(const nlohmann::json& config);
  std::shared_ptr<Run> get(const std::string& run_id) const;  // throws UnknownRun
  std::vector<std::shared_ptr<Run>> list() const;
  void stop(const std::string& run_id);
  std::size_t active() const;
  std::size_t max_active() const { return max_active_; }

 private:
  struct Entry {
    std::shared_ptr<Run> run;
    std::thread worker;
  };
  std::size_t max_active_;
  std::string base_dir_;
  mutable std::mutex mu_;
  std::map<std::string, Entry> runs_;
  std::vector<std::string> order_;
};

// Port from PIPESEARCH_PORT, else 8351.
int default_port();

// JSON-over-HTTP control API under /api/v1.
class ControlServer {
 public:
  explicit ControlServer(RunManager& runs);
  ~ControlServer();
  ControlServer(const ControlServer&) = delete;
  ControlServer& operator=(const ControlServer&) = delete;

  // Binds; port 0 picks a free one. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Serves until stop(). Call after bind().
  void serve();
  void stop();

 private:
  void routes();

  RunManager& runs_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace pipesearch
