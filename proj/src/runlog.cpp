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

#include "pipesearch/runlog.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

#include "pipesearch/errors.hpp"

namespace pipesearch {

using nlohmann::json;

void check_record(const RunLogRecord& r) {
  if (r.eval_id.empty()) throw LogError("record has an empty eval_id");
  if (r.status != "ok" && r.status != "timeout" && r.status != "error")
    throw LogError("record " + r.eval_id + " has unknown status '" + r.status + "'");
  if ((r.status == "ok") != r.objectives.has_value())
    throw LogError("record " + r.eval_id + ": status ok requires objectives, and only ok may carry them");
  if (r.objectives)
    for (double v : *r.objectives)
      if (!std::isfinite(v)) throw LogError("record " + r.eval_id + " has a non-finite objective");
  if (!std::isfinite(r.fidelity) || !std::isfinite(r.duration_s) || r.duration_s < 0.0)
    throw LogError("record " + r.eval_id + " has invalid fidelity or duration");
  if (r.parent_ids.size() > 2) throw LogError("record " + r.eval_id + " has more than 2 parents");
}

json record_to_json(const RunLogRecord& r) {
  json j;
  j["eval_id"] = r.eval_id;
  j["parent_ids"] = r.parent_ids;
  j["origin"] = r.origin;
  j["pipeline"] = r.pipeline;
  j["fidelity"] = r.fidelity;
  j["objectives"] = r.objectives ? json(*r.objectives) : json(nullptr);
  j["status"] = r.status;
  j["error_msg"] = r.error_msg ? json(*r.error_msg) : json(nullptr);
  j["start_time"] = r.start_time;
  j["duration_s"] = r.duration_s;
  j["cached"] = r.cached;
  return j;
}

RunLogRecord record_from_json(const json& j) {
  static const std::set<std::string> keys = {"eval_id",  "parent_ids", "origin",     "pipeline",   "fidelity", "objectives",
                                             "status",   "error_msg",  "start_time", "duration_s", "cached"};
  if (!j.is_object()) throw LogError("record is not a JSON object");
  for (const auto& [k, v] : j.items())
    if (!keys.contains(k)) throw LogError("unknown record field '" + k + "'");
  RunLogRecord r;
  try {
    r.eval_id = j.at("eval_id").get<std::string>();
    r.parent_ids = j.at("parent_ids").get<std::vector<std::string>>();
    r.origin = j.at("origin").get<std::string>();
    r.pipeline = j.at("pipeline").get<std::string>();
    r.fidelity = j.at("fidelity").get<double>();
    if (!j.at("objectives").is_null()) r.objectives = j.at("objectives").get<std::vector<double>>();
    r.status = j.at("status").get<std::string>();
    if (!j.at("error_msg").is_null()) r.error_msg = j.at("error_msg").get<std::string>();
    r.start_time = j.at("start_time").get<std::string>();
    r.duration_s = j.at("duration_s").get<double>();
    r.cached = j.at("cached").get<bool>();
  } catch (const json::exception& e) {
    throw LogError(std::string("malformed record: ") + e.what());
  }
  check_record(r);
  return r;
}

std::string canonical_line(const RunLogRecord& r) { return record_to_json(r).dump(); }

std::string format_timestamp(std::chrono::system_clock::time_point t) {
  using namespace std::chrono;
  const auto ms = duration_cast<milliseconds>(t.time_since_epoch()).count();
  auto secs = static_cast<std::time_t>(ms / 1000);
  auto millis = ms % 1000;
  if (millis < 0) {
    millis += 1000;
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(millis));
  return buf;
}

std::chrono::system_clock::time_point parse_timestamp(std::string_view text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0, ms = 0;
  const std::string copy(text);
  char z = 0;
  if (std::sscanf(copy.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3d%c", &y, &mo, &d, &h, &mi, &s, &ms, &z) != 8 || z != 'Z')
    throw LogError("malformed timestamp '" + copy + "'");
  using namespace std::chrono;
  const auto days = sys_days(year{y} / month{static_cast<unsigned>(mo)} / day{static_cast<unsigned>(d)});
  return system_clock::time_point(days) + hours(h) + minutes(mi) + seconds(s) + milliseconds(ms);
}

LogWriter::LogWriter(const std::filesystem::path& path, json header) : path_(path) {
  file_ = std::fopen(path.c_str(), "wb");
  if (file_ == nullptr) throw LogError("cannot open log " + path.string());
  header["format_version"] = kLogFormatVersion;
  write_line(header.dump());
}

LogWriter::~LogWriter() {
  if (file_ != nullptr) std::fclose(file_);
}

void LogWriter::write_line(const std::string& line) {
  const std::string out = line + "\n";
  if (std::fwrite(out.data(), 1, out.size(), file_) != out.size() || std::fflush(file_) != 0)
    throw LogError("write to " + path_.string() + " failed");
}

std::size_t LogWriter::append(const RunLogRecord& r) {
  check_record(r);
  if (ids_.contains(r.eval_id)) throw LogError("duplicate eval_id " + r.eval_id);
  for (const auto& p : r.parent_ids)
    if (!ids_.contains(p)) throw LogError("record " + r.eval_id + " references parent " + p + " not earlier in the log");
  write_line(canonical_line(r));
  ids_.insert(r.eval_id);
  return ++count_;
}

ParsedLog parse_log_text(std::string_view text) {
  ParsedLog log;
  std::set<std::string> ids;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    const bool terminated = nl != std::string_view::npos;
    const auto line = text.substr(pos, (terminated ? nl : text.size()) - pos);
    pos = terminated ? nl + 1 : text.size();
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = json::parse(line);
      if (line_no == 1 && j.is_object() && j.contains("format_version")) {
        if (j["format_version"] != kLogFormatVersion)
          throw LogError("unsupported log format_version " + j["format_version"].dump());
        log.header = j;
        continue;
      }
      auto r = record_from_json(j);
      if (ids.contains(r.eval_id)) throw LogError("duplicate eval_id " + r.eval_id);
      for (const auto& p : r.parent_ids)
        if (!ids.contains(p)) throw LogError("parent " + p + " of record " + r.eval_id + " does not precede it");
      ids.insert(r.eval_id);
      log.records.push_back(std::move(r));
    } catch (const std::exception& e) {
      if (!terminated) {
        log.warnings.push_back("skipped truncated final line " + std::to_string(line_no));
        break;
      }
      throw LogError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return log;
}

ParsedLog parse_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LogError("cannot open log " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_log_text(buf.str());
  } catch (const LogError& e) {
    throw LogError(path.string() + ": " + e.what());
  }
}

std::vector<SeriesPoint> best_so_far(std::span<const RunLogRecord> records, std::size_t objective) {
  std::vector<SeriesPoint> out;
  if (records.empty()) return out;
  auto origin = parse_timestamp(records.front().start_time);
  for (const auto& r : records) origin = std::min(origin, parse_timestamp(r.start_time));

  std::vector<std::pair<double, double>> done;
  for (const auto& r : records) {
    if (r.status != "ok" || !r.objectives || r.objectives->size() <= objective) continue;
    const double start = std::chrono::duration<double>(parse_timestamp(r.start_time) - origin).count();
    done.emplace_back(start + r.duration_s, (*r.objectives)[objective]);
  }
  std::stable_sort(done.begin(), done.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [t, v] : done) out.push_back({t, out.empty() ? v : std::max(out.back().value, v)});
  return out;
}

namespace {

LineageNode build_lineage(const std::map<std::string, const RunLogRecord*>& index, const std::string& id) {
  const auto it = index.find(id);
  if (it == index.end()) throw LogError("unknown eval_id " + id);
  LineageNode node{*it->second, {}};
  for (const auto& p : it->second->parent_ids) node.parents.push_back(build_lineage(index, p));
  return node;
}

}  // namespace

LineageNode lineage(std::span<const RunLogRecord> records, const std::string& eval_id) {
  std::map<std::string, const RunLogRecord*> index;
  for (const auto& r : records) index[r.eval_id] = &r;
  return build_lineage(index, eval_id);
}

json lineage_to_json(const LineageNode& node) {
  json parents = json::array();
  for (const auto& p : node.parents) parents.push_back(lineage_to_json(p));
  return {{"eval_id", node.record.eval_id},
          {"origin", node.record.origin},
          {"pipeline", node.record.pipeline},
          {"objectives", node.record.objectives ? json(*node.record.objectives) : json(nullptr)},
          {"parents", parents}};
}

RunSummary summarize_run(const ParsedLog& log, std::string run_id, std::string path, std::size_t objective) {
  RunSummary s;
  s.run_id = std::move(run_id);
  s.path = std::move(path);
  s.series = best_so_far(log.records, objective);
  s.n_evaluations = log.records.size();
  std::size_t failed = 0;
  const RunLogRecord* best = nullptr;
  for (const auto& r : log.records) {
    if (r.status == "ok") {
      ++s.n_ok;
      if (best == nullptr || (*r.objectives)[objective] > (*best->objectives)[objective]) best = &r;
    } else {
      ++failed;
    }
  }
  if (best != nullptr) s.final_objectives = *best->objectives;
  s.error_rate = s.n_evaluations == 0 ? 0.0 : static_cast<double>(failed) / static_cast<double>(s.n_evaluations);
  return s;
}

ComparisonReport compare_runs(std::span<const std::filesystem::path> paths, std::size_t objective) {
  if (paths.empty()) throw LogError("compare_runs needs at least one log");
  ComparisonReport report;
  for (const auto& path : paths) {
    const auto log = parse_log(path);
    std::string run_id = path.stem().string();
    if (log.header.is_object() && log.header.contains("run_id") && log.header["run_id"].is_string())
      run_id = log.header["run_id"].get<std::string>();
    report.runs.push_back(summarize_run(log, run_id, path.string(), objective));
  }
  return report;
}

json ComparisonReport::to_json() const {
  json runs_json = json::array();
  for (const auto& r : runs) {
    json series = json::array();
    for (const auto& p : r.series) series.push_back({p.elapsed_s, p.value});
    runs_json.push_back({{"run_id", r.run_id},
                         {"path", r.path},
                         {"n_evaluations", r.n_evaluations},
                         {"n_ok", r.n_ok},
                         {"error_rate", r.error_rate},
                         {"final_objectives", r.final_objectives ? json(*r.final_objectives) : json(nullptr)},
                         {"series", series}});
  }
  return {{"runs", runs_json}};
}

std::string ComparisonReport::plot_csv() const {
  std::string out = "elapsed_s,run_id,best\n";
  for (const auto& r : runs)
    for (const auto& p : r.series) out += json(p.elapsed_s).dump() + "," + r.run_id + "," + json(p.value).dump() + "\n";
  return out;
}

}  // namespace pipesearch
