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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pipesearch/cancel.hpp"
#include "pipesearch/config.hpp"
#include "pipesearch/dataset.hpp"
#include "pipesearch/evaluation.hpp"
#include "pipesearch/runlog.hpp"
#include "pipesearch/strategies.hpp"

namespace pipesearch {

struct Budget {
  double total_seconds = 60.0;
  double per_eval_timeout_seconds = 6.0;
  double post_processing_fraction = 0.3;

  double search_seconds() const { return total_seconds * (1.0 - post_processing_fraction); }
};

// Fills in defaults: post fraction 0.3 for "ensemble", 0.1 for "best";
// per-evaluation timeout 10% of the total, capped at the search share.
Budget resolve_budget(const BudgetConfig& cfg, std::string_view post);

// Seconds left until `deadline`, never negative.
double remaining(Clock::time_point deadline, Clock::time_point now);

using Evaluator = std::function<EvaluationResult(const CandidateRequest&, const CancelToken&)>;

struct LoopSettings {
  std::size_t n_workers = 1;
  Clock::time_point deadline = Clock::time_point::max();  // dispatch stops, in-flight work is cancelled
  double per_eval_timeout_s = 60.0;
  // How long a cancelled evaluation may take to wind down before it is
  // written off as a timeout and its worker abandoned.
  double abandon_after_s = 1.0;
  std::size_t max_evaluations = 0;  // 0 = unbounded
  const std::atomic<bool>* stop = nullptr;
  std::size_t* dispatched = nullptr;  // incremented once per dispatch, if set
};

// Runs the dispatch/receive loop until the deadline, the evaluation cap or a
// stop. Keeps up to n_workers evaluations in flight, replays duplicates
// (canonical string + fidelity) from a cache, and reports each dispatched
// candidate exactly once through `on_result` before passing it to
// strategy.receive. All strategy calls happen on the calling thread. The
// evaluator runs on worker threads and must own (or share) what it touches.
// Returns every reported result in report order.
std::vector<EvaluationResult> event_loop(SearchStrategy& strategy, Rng& rng, const Evaluator& evaluator,
                                         const LoopSettings& settings,
                                         const std::function<void(const EvaluationResult&)>& on_result = {});

RunLogRecord to_record(const EvaluationResult& r);

enum class Phase { loading, searching, post_processing, done, failed, stopped };
std::string_view phase_name(Phase phase);

struct RunStatus {
  std::string run_id;
  Phase phase = Phase::loading;
  std::size_t evaluations_completed = 0;
  std::optional<std::vector<double>> best_objectives;
  std::string best_pipeline;
  double elapsed_s = 0.0;
  double remaining_s = 0.0;
  std::string message;

  nlohmann::json to_json() const;
};

struct RunResult {
  std::string run_id;
  Phase phase = Phase::failed;
  std::string message;
  std::filesystem::path log_path;
  std::optional<std::filesystem::path> model_path;
  std::filesystem::path summary_path;
  nlohmann::json summary;
};

struct SequencedRecord {
  std::size_t seq = 0;  // 1-based position in the log
  RunLogRecord record;
};

std::string new_run_id();

// One AutoML run: load, search, post-process, write artifacts. execute()
// blocks; stop(), status() and records_since() may be called from any thread.
class Run {
 public:
  // `data` replaces reading cfg.dataset_path (the benchmark passes its
  // training split this way).
  explicit Run(RunConfig cfg, std::shared_ptr<const Table> data = nullptr);

  RunResult execute();
  void stop();
  RunStatus status() const;
  bool finished() const;

  // Records with seq > since. Waits up to `wait` for at least one unless the
  // run has finished.
  std::vector<SequencedRecord> records_since(std::size_t since, std::chrono::milliseconds wait) const;

  const std::string& run_id() const { return cfg_.run_id; }
  const RunConfig& config() const { return cfg_; }
  std::filesystem::path log_path() const;

 private:
  void set_phase(Phase phase, std::string message = {});
  void publish(const EvaluationResult& r, LogWriter& log);

  RunConfig cfg_;
  Budget budget_;
  std::shared_ptr<const Table> data_;
  Clock::time_point start_;
  std::atomic<bool> stop_{false};

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
  RunStatus status_;
  bool finished_ = false;
  std::vector<RunLogRecord> records_;
};

RunResult run_automl(const RunConfig& cfg);

}  // namespace pipesearch
