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

#include "pipesearch/orchestrator.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <random>
#include <thread>

#include "pipesearch/postprocess.hpp"

namespace pipesearch {

using nlohmann::json;
using std::chrono::duration;
using std::chrono::duration_cast;

Budget resolve_budget(const BudgetConfig& cfg, std::string_view post) {
  Budget b;
  b.total_seconds = cfg.total_seconds;
  b.post_processing_fraction = cfg.post_processing_fraction.value_or(post == "best" ? 0.1 : 0.3);
  b.per_eval_timeout_seconds =
      cfg.per_eval_timeout_seconds.value_or(std::min(0.1 * b.total_seconds, b.search_seconds()));
  return b;
}

double remaining(Clock::time_point deadline, Clock::time_point now) {
  return std::max(0.0, duration<double>(deadline - now).count());
}

namespace {

Clock::duration seconds_to(double s) { return duration_cast<Clock::duration>(duration<double>(s)); }

std::string cache_key(const std::string& canonical, double fidelity) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", fidelity);
  return canonical + "@" + buf;
}

struct Completion {
  std::uint64_t seq;
  EvaluationResult result;
};

struct Mailbox {
  std::mutex mu;
  std::condition_variable cv;
  std::deque<Completion> done;
};

struct Flight {
  CandidateRequest request;
  std::string canonical;
  std::string key;
  WallClock::time_point start_wall;
  Clock::time_point started;
  Clock::time_point abandon_at = Clock::time_point::max();
  std::shared_ptr<std::atomic<bool>> flag;  // null for a waiter on a duplicate
  std::thread worker;
};

// Cancels and lets go of whatever is still running if the loop unwinds.
struct FlightGuard {
  std::map<std::uint64_t, Flight>& flights;
  ~FlightGuard() {
    for (auto& [seq, f] : flights) {
      if (f.flag) f.flag->store(true);
      if (f.worker.joinable()) f.worker.detach();
    }
  }
};

EvaluationResult replay(const EvaluationResult& source, std::uint64_t seq, const Flight& f) {
  EvaluationResult r = source;
  r.seq = seq;
  r.pipeline = f.request.pipeline;
  r.origin = f.request.origin;
  r.start_time = f.start_wall;
  r.duration_s = 0.0;
  r.cached = true;
  return r;
}

}  // namespace

std::vector<EvaluationResult> event_loop(SearchStrategy& strategy, Rng& rng, const Evaluator& evaluator,
                                         const LoopSettings& s,
                                         const std::function<void(const EvaluationResult&)>& on_result) {
  const std::size_t n_workers = std::max<std::size_t>(1, s.n_workers);
  const auto timeout = seconds_to(s.per_eval_timeout_s);
  const auto abandon_after = seconds_to(s.abandon_after_s);
  auto mailbox = std::make_shared<Mailbox>();

  std::map<std::uint64_t, Flight> flights;
  FlightGuard guard{flights};
  std::map<std::string, EvaluationResult> cache;
  std::map<std::string, std::uint64_t> running;
  std::vector<EvaluationResult> reported;
  std::uint64_t next_seq = 1;
  bool stopping = false;

  auto report = [&](EvaluationResult r) {
    if (on_result) on_result(r);
    strategy.receive(r);
    reported.push_back(std::move(r));
  };

  auto finish = [&](std::uint64_t seq, EvaluationResult r, bool from_worker) {
    auto node = flights.extract(seq);
    Flight& f = node.mapped();
    if (f.worker.joinable()) {
      if (from_worker) f.worker.join();
      else f.worker.detach();
    }
    const double measured = duration<double>(Clock::now() - f.started).count();
    r.seq = seq;
    r.pipeline = f.request.pipeline;
    r.canonical = f.canonical;
    r.origin = f.request.origin;
    r.fidelity = f.request.fidelity;
    r.start_time = f.start_wall;
    r.cached = false;
    if (!from_worker || r.duration_s <= 0.0) r.duration_s = measured;
    if (!r.ok()) {
      r.objectives.clear();
      r.predictions.reset();
      if (r.error_msg.empty()) r.error_msg = std::string(status_name(r.status));
    }
    running.erase(f.key);
    const auto& stored = cache.insert_or_assign(f.key, r).first->second;
    report(std::move(r));

    std::vector<std::uint64_t> waiters;
    for (const auto& [q, w] : flights)
      if (!w.flag && w.key == f.key) waiters.push_back(q);
    for (auto q : waiters) {
      auto w = flights.extract(q);
      report(replay(stored, q, w.mapped()));
    }
  };

  auto halt_requested = [&] { return (s.stop != nullptr && s.stop->load()) || Clock::now() >= s.deadline; };

  while (true) {
    if (!stopping && halt_requested()) {
      stopping = true;
      const auto bound = Clock::now() + abandon_after;
      for (auto& [q, f] : flights)
        if (f.flag) {
          f.flag->store(true);
          f.abandon_at = std::min(f.abandon_at, bound);
        }
    }

    while (!stopping && flights.size() < n_workers && (s.max_evaluations == 0 || next_seq <= s.max_evaluations)) {
      Flight f;
      f.request = strategy.dispatch(rng);
      const std::uint64_t seq = next_seq++;
      if (s.dispatched != nullptr) ++*s.dispatched;
      f.canonical = canonical_encode(f.request.pipeline);
      f.key = cache_key(f.canonical, f.request.fidelity);
      f.start_wall = WallClock::now();
      f.started = Clock::now();

      if (const auto hit = cache.find(f.key); hit != cache.end()) {
        report(replay(hit->second, seq, f));
        stopping = halt_requested();
        continue;
      }
      if (running.contains(f.key)) {
        flights.emplace(seq, std::move(f));
        continue;
      }
      const auto eval_deadline = std::min(f.started + timeout, s.deadline);
      f.flag = std::make_shared<std::atomic<bool>>(false);
      f.abandon_at = eval_deadline + abandon_after;
      CancelToken token(f.flag, eval_deadline);
      f.worker = std::thread([mailbox, evaluator, request = f.request, token, seq] {
        EvaluationResult r;
        try {
          r = evaluator(request, token);
        } catch (const Cancelled&) {
          r.status = EvalStatus::timeout;
          r.error_msg = "evaluation cancelled";
        } catch (const std::exception& e) {
          r.status = EvalStatus::error;
          r.error_msg = e.what();
        } catch (...) {
          r.status = EvalStatus::error;
          r.error_msg = "unknown failure";
        }
        {
          std::lock_guard lock(mailbox->mu);
          mailbox->done.push_back({seq, std::move(r)});
        }
        mailbox->cv.notify_all();
      });
      running[f.key] = seq;
      flights.emplace(seq, std::move(f));
    }

    if (flights.empty()) break;

    std::deque<Completion> done;
    {
      auto wake = Clock::now() + std::chrono::milliseconds(50);
      for (const auto& [q, f] : flights) wake = std::min(wake, f.abandon_at);
      if (!stopping) wake = std::min(wake, s.deadline);
      std::unique_lock lock(mailbox->mu);
      mailbox->cv.wait_until(lock, wake, [&] { return !mailbox->done.empty(); });
      done.swap(mailbox->done);
    }
    for (auto& c : done)
      if (flights.contains(c.seq)) finish(c.seq, std::move(c.result), true);

    const auto now = Clock::now();
    std::vector<std::uint64_t> late;
    for (const auto& [q, f] : flights)
      if (f.flag && now >= f.abandon_at) late.push_back(q);
    for (auto q : late) {
      if (!flights.contains(q)) continue;
      flights.at(q).flag->store(true);
      EvaluationResult r;
      r.status = EvalStatus::timeout;
      r.error_msg = "evaluation did not stop after cancellation; abandoned";
      finish(q, std::move(r), false);
    }
  }
  return reported;
}

RunLogRecord to_record(const EvaluationResult& r) {
  RunLogRecord rec;
  rec.eval_id = r.eval_id();
  rec.parent_ids = r.origin.parent_ids;
  rec.origin = r.origin.to_string();
  rec.pipeline = r.canonical.empty() ? canonical_encode(r.pipeline) : r.canonical;
  rec.fidelity = r.fidelity;
  if (r.ok()) rec.objectives = r.objectives;
  rec.status = std::string(status_name(r.status));
  if (!r.ok()) rec.error_msg = r.error_msg;
  rec.start_time = format_timestamp(r.start_time);
  rec.duration_s = r.duration_s;
  rec.cached = r.cached;
  return rec;
}

std::string_view phase_name(Phase phase) {
  switch (phase) {
    case Phase::loading: return "loading";
    case Phase::searching: return "searching";
    case Phase::post_processing: return "post_processing";
    case Phase::done: return "done";
    case Phase::failed: return "failed";
    case Phase::stopped: return "stopped";
  }
  return "unknown";
}

json RunStatus::to_json() const {
  return {{"run_id", run_id},
          {"phase", std::string(phase_name(phase))},
          {"evaluations_completed", evaluations_completed},
          {"best_objectives", best_objectives ? json(*best_objectives) : json(nullptr)},
          {"best_pipeline", best_pipeline.empty() ? json(nullptr) : json(best_pipeline)},
          {"elapsed_s", elapsed_s},
          {"remaining_s", remaining_s},
          {"message", message}};
}

std::string new_run_id() {
  const auto now = WallClock::now();
  const std::time_t t = WallClock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%S", &tm);
  static std::atomic<unsigned> counter{0};
  std::random_device rd;
  char tail[16];
  std::snprintf(tail, sizeof tail, "%04x%02x", rd() & 0xffffu, counter.fetch_add(1) & 0xffu);
  return std::string(stamp) + "-" + tail;
}

Run::Run(RunConfig cfg, std::shared_ptr<const Table> data)
    : cfg_(std::move(cfg)), budget_(resolve_budget(cfg_.budget, cfg_.post)), data_(std::move(data)),
      start_(Clock::now()) {
  if (cfg_.run_id.empty()) cfg_.run_id = new_run_id();
  status_.run_id = cfg_.run_id;
  status_.remaining_s = budget_.total_seconds;
}

std::filesystem::path Run::log_path() const {
  return std::filesystem::path(cfg_.output_dir) / ("run-" + cfg_.run_id + ".jsonl");
}

namespace {

bool terminal(Phase p) { return p == Phase::done || p == Phase::failed || p == Phase::stopped; }

}  // namespace

void Run::set_phase(Phase phase, std::string message) {
  {
    std::lock_guard lock(mu_);
    if (terminal(status_.phase)) return;
    if (!terminal(phase) && static_cast<int>(phase) < static_cast<int>(status_.phase)) return;
    status_.phase = phase;
    if (!message.empty()) status_.message = std::move(message);
    if (terminal(phase)) finished_ = true;
  }
  cv_.notify_all();
}

void Run::publish(const EvaluationResult& r, LogWriter& log) {
  auto rec = to_record(r);
  log.append(rec);
  {
    std::lock_guard lock(mu_);
    records_.push_back(std::move(rec));
    ++status_.evaluations_completed;
    if (r.ok() && (!status_.best_objectives || r.objectives[0] > (*status_.best_objectives)[0])) {
      status_.best_objectives = r.objectives;
      status_.best_pipeline = r.canonical;
    }
  }
  cv_.notify_all();
}

void Run::stop() {
  stop_.store(true);
  cv_.notify_all();
}

RunStatus Run::status() const {
  std::lock_guard lock(mu_);
  RunStatus s = status_;
  if (!finished_) {
    const auto now = Clock::now();
    s.elapsed_s = duration<double>(now - start_).count();
    s.remaining_s = remaining(start_ + seconds_to(budget_.total_seconds), now);
  }
  return s;
}

bool Run::finished() const {
  std::lock_guard lock(mu_);
  return finished_;
}

std::vector<SequencedRecord> Run::records_since(std::size_t since, std::chrono::milliseconds wait) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, wait, [&] { return records_.size() > since || finished_; });
  std::vector<SequencedRecord> out;
  for (std::size_t i = since; i < records_.size(); ++i) out.push_back({i + 1, records_[i]});
  return out;
}

RunResult Run::execute() {
  namespace fs = std::filesystem;
  RunResult result;
  result.run_id = cfg_.run_id;
  const fs::path out_dir(cfg_.output_dir);
  result.log_path = log_path();
  result.summary_path = out_dir / ("summary-" + cfg_.run_id + ".json");
  const fs::path model_path = out_dir / ("model-" + cfg_.run_id + ".json");

  const auto total = seconds_to(budget_.total_seconds);
  const auto search_deadline = start_ + seconds_to(budget_.search_seconds());
  const auto hard_end = start_ + seconds_to(budget_.total_seconds * 1.05);
  Clock::time_point t_loaded = start_, t_searched = start_;

  json summary = {{"run_id", cfg_.run_id},
                  {"search", cfg_.search},
                  {"post_processing", cfg_.post},
                  {"metric", std::string(metric_name(cfg_.metric))},
                  {"seed", cfg_.seed},
                  {"budget",
                   {{"total_seconds", budget_.total_seconds},
                    {"per_eval_timeout_seconds", budget_.per_eval_timeout_seconds},
                    {"post_processing_fraction", budget_.post_processing_fraction}}},
                  {"log_path", result.log_path.string()}};
  std::vector<std::string> warnings;
  std::vector<EvaluationResult> library;
  std::size_t dispatched = 0;

  auto finalize = [&](Phase phase, const std::string& message) {
    const auto end = Clock::now();
    auto secs = [](Clock::duration d) { return duration<double>(d).count(); };
    summary["phase"] = std::string(phase_name(phase));
    summary["message"] = message;
    summary["warnings"] = warnings;
    std::size_t counts[3] = {0, 0, 0};
    std::size_t cached = 0;
    for (const auto& r : library) {
      ++counts[static_cast<int>(r.status)];
      cached += r.cached ? 1 : 0;
    }
    summary["n_evaluations"] = library.size();
    summary["n_dispatched"] = dispatched;
    summary["n_ok"] = counts[0];
    summary["n_timeout"] = counts[1];
    summary["n_error"] = counts[2];
    summary["n_cached"] = cached;
    summary["timings"] = {{"load_s", secs(t_loaded - start_)},
                          {"search_s", secs(std::max(t_searched, t_loaded) - t_loaded)},
                          {"post_processing_s", secs(end - std::max(t_searched, t_loaded))},
                          {"total_s", secs(end - start_)}};
    if (result.model_path) summary["model_path"] = result.model_path->string();
    result.phase = phase;
    result.message = message;
    try {
      fs::create_directories(out_dir);
      std::ofstream out(result.summary_path);
      out << summary.dump(2) << "\n";
    } catch (const std::exception& e) {
      warnings.push_back(std::string("could not write summary: ") + e.what());
    }
    result.summary = summary;
    {
      std::lock_guard lock(mu_);
      status_.elapsed_s = secs(end - start_);
      status_.remaining_s = remaining(start_ + total, end);
    }
    set_phase(phase, message);
    return result;
  };

  std::unique_ptr<LogWriter> log;
  try {
    fs::create_directories(out_dir);
    log = std::make_unique<LogWriter>(
        result.log_path, json{{"run_id", cfg_.run_id}, {"search", cfg_.search}, {"post_processing", cfg_.post},
                              {"seed", cfg_.seed}});
  } catch (const std::exception& e) {
    return finalize(Phase::failed, std::string("cannot create run log: ") + e.what());
  }

  // loading
  std::shared_ptr<const Dataset> ds;
  std::shared_ptr<const CVSplits> splits;
  FeatureEncoder encoder;
  std::unique_ptr<SearchStrategy> strategy;
  std::size_t folds = cfg_.cv_folds;
  try {
    std::shared_ptr<const Table> table = data_ ? data_ : std::make_shared<const Table>(read_csv(cfg_.dataset_path));
    encoder = FeatureEncoder::fit(*table, cfg_.target);
    auto loaded = std::make_shared<Dataset>(make_dataset(*table, encoder));
    check_dataset(*loaded);
    std::vector<std::size_t> per_class(loaded->class_count(), 0);
    for (int y : loaded->labels) ++per_class[static_cast<std::size_t>(y)];
    const std::size_t smallest = *std::min_element(per_class.begin(), per_class.end());
    folds = std::max<std::size_t>(2, std::min(folds, smallest));
    splits = std::make_shared<const CVSplits>(make_splits(loaded->labels, folds, derive_seed(cfg_.seed, 2)));
    ds = std::move(loaded);
    strategy = make_strategy(cfg_.search, cfg_.search_params, cfg_.space);
  } catch (const std::exception& e) {
    t_loaded = t_searched = Clock::now();
    return finalize(Phase::failed, std::string("dataset load failed: ") + e.what());
  }
  t_loaded = Clock::now();
  summary["cv_folds"] = folds;
  summary["dataset"] = {{"rows", ds->rows()}, {"features", ds->features.cols()}, {"classes", ds->class_names}};

  // searching
  set_phase(Phase::searching);
  EvalConfig ec;
  ec.folds = folds;
  ec.metric = cfg_.metric;
  ec.timeout_s = budget_.per_eval_timeout_seconds;
  ec.seed = cfg_.seed;
  Evaluator evaluator = [ds, splits, ec](const CandidateRequest& req, const CancelToken& token) {
    return evaluate(req.pipeline, *ds, *splits, req.fidelity, ec, token);
  };
  LoopSettings settings;
  settings.n_workers = cfg_.n_workers;
  settings.deadline = search_deadline;
  settings.per_eval_timeout_s = budget_.per_eval_timeout_seconds;
  settings.abandon_after_s = std::clamp(0.02 * budget_.total_seconds, 0.05, 1.0);
  settings.max_evaluations = cfg_.max_evaluations;
  settings.stop = &stop_;
  settings.dispatched = &dispatched;
  Rng rng(derive_seed(cfg_.seed, 1));
  try {
    library = event_loop(*strategy, rng, evaluator, settings, [&](const EvaluationResult& r) { publish(r, *log); });
  } catch (const std::exception& e) {
    t_searched = Clock::now();
    return finalize(Phase::failed, std::string("search aborted: ") + e.what());
  }
  t_searched = Clock::now();

  // post-processing
  const bool stopped_in_search = stop_.load();
  set_phase(Phase::post_processing);
  auto post_deadline = hard_end;
  if (stopped_in_search)
    post_deadline = std::min(hard_end, t_searched + std::min(total / 10, seconds_to(remaining(start_ + total, t_searched))));
  const CancelToken post_token(std::make_shared<std::atomic<bool>>(false), post_deadline);

  try {
    const auto& best = select_best(library);
    summary["best_pipeline"] = best.canonical;
    summary["objectives"] = best.objectives;
    Model model;
    if (cfg_.post == "best") {
      model.kind = "best";
      model.encoder = encoder;
      model.class_names = ds->class_names;
      model.members.push_back({1.0, fit_final(best.pipeline, *ds, cfg_.seed, post_token)});
      summary["validation_score"] = best.objectives[0];
    } else {
      const std::size_t size = cfg_.post_params.value("size", 25);
      const auto ens = ensemble_select(library, size, cfg_.metric, ds->labels, &stop_);
      model = build_ensemble_model(ens, library, *ds, encoder, cfg_.seed, post_token, warnings, &stop_);
      json members = json::array();
      for (const auto& m : ens.members)
        members.push_back({{"pipeline", m.pipeline}, {"count", m.count}, {"weight", m.weight}});
      summary["ensemble"] = {{"members", members},
                             {"step_scores", ens.step_scores},
                             {"kept", ens.kept},
                             {"best_single_score", ens.step_scores.front()}};
      summary["validation_score"] = ens.final_score();
    }
    model.save(model_path);
    result.model_path = model_path;
  } catch (const std::exception& e) {
    if (stop_.load()) return finalize(Phase::stopped, std::string("stopped; no model: ") + e.what());
    return finalize(Phase::failed, e.what());
  }
  if (stop_.load()) return finalize(Phase::stopped, "stopped");
  return finalize(Phase::done, "");
}

RunResult run_automl(const RunConfig& cfg) { return Run(cfg).execute(); }

}  // namespace pipesearch
