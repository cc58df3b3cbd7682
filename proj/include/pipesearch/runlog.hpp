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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace pipesearch {

inline constexpr int kLogFormatVersion = 1;

// One evaluation, exactly as stored on disk.
struct RunLogRecord {
  std::string eval_id;
  std::vector<std::string> parent_ids;
  std::string origin;
  std::string pipeline;
  double fidelity = 1.0;
  std::optional<std::vector<double>> objectives;
  std::string status;
  std::optional<std::string> error_msg;
  std::string start_time;  // UTC ISO-8601 with milliseconds
  double duration_s = 0.0;
  bool cached = false;

  friend bool operator==(const RunLogRecord&, const RunLogRecord&) = default;
};

// Throws LogError if the record breaks a field-level invariant.
void check_record(const RunLogRecord& r);

nlohmann::json record_to_json(const RunLogRecord& r);
RunLogRecord record_from_json(const nlohmann::json& j);

// Sorted keys, no whitespace, no trailing newline.
std::string canonical_line(const RunLogRecord& r);

std::string format_timestamp(std::chrono::system_clock::time_point t);
std::chrono::system_clock::time_point parse_timestamp(std::string_view text);

// Append-only JSON-Lines writer. The first line is a header object carrying
// format_version; each append is written and flushed before returning.
class LogWriter {
 public:
  LogWriter(const std::filesystem::path& path, nlohmann::json header);
  ~LogWriter();
  LogWriter(const LogWriter&) = delete;
  LogWriter& operator=(const LogWriter&) = delete;

  // Returns the record's 1-based sequence number. Rejects (without writing)
  // invalid records, duplicate eval_ids and parents not yet in the file.
  std::size_t append(const RunLogRecord& r);

  const std::filesystem::path& path() const { return path_; }
  std::size_t size() const { return count_; }

 private:
  void write_line(const std::string& line);

  std::filesystem::path path_;
  std::FILE* file_ = nullptr;
  std::set<std::string> ids_;
  std::size_t count_ = 0;
};

struct ParsedLog {
  nlohmann::json header;  // null when the file has no header line
  std::vector<RunLogRecord> records;
  std::vector<std::string> warnings;
};

ParsedLog parse_log(const std::filesystem::path& path);
ParsedLog parse_log_text(std::string_view text);

struct SeriesPoint {
  double elapsed_s = 0.0;
  double value = 0.0;
};

// Running maximum of one objective over completion time, measured from the
// earliest start_time in `records`. One point per ok record.
std::vector<SeriesPoint> best_so_far(std::span<const RunLogRecord> records, std::size_t objective = 0);

struct LineageNode {
  RunLogRecord record;
  std::vector<LineageNode> parents;
};

LineageNode lineage(std::span<const RunLogRecord> records, const std::string& eval_id);
nlohmann::json lineage_to_json(const LineageNode& node);

struct RunSummary {
  std::string run_id;
  std::string path;
  std::vector<SeriesPoint> series;
  std::optional<std::vector<double>> final_objectives;
  std::size_t n_evaluations = 0;
  std::size_t n_ok = 0;
  double error_rate = 0.0;  // (timeout + error) / evaluations
};

struct ComparisonReport {
  std::vector<RunSummary> runs;

  nlohmann::json to_json() const;
  // Header "elapsed_s,run_id,best" then one row per series point.
  std::string plot_csv() const;
};

RunSummary summarize_run(const ParsedLog& log, std::string run_id, std::string path, std::size_t objective = 0);
ComparisonReport compare_runs(std::span<const std::filesystem::path> paths, std::size_t objective = 0);

}  // namespace pipesearch
