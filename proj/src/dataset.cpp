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

#include "pipesearch/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "pipesearch/rng.hpp"

namespace pipesearch {

namespace {

using Code = DatasetError::Code;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& cell, double& out) {
  const auto t = trim(cell);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && std::isfinite(out);
}

double median_of(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

std::ptrdiff_t Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  return it == header.end() ? -1 : it - header.begin();
}

Table parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  std::size_t line = 1;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        if (c == '\n') ++line;
        field += c;
      }
      continue;
    }
    if (c == '"') {
      quoted = true;
      any = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
      }
      record.clear();
      field.clear();
      any = false;
      ++line;
    } else {
      field += c;
      any = true;
    }
  }
  if (quoted) throw DatasetError(Code::unparseable, "unterminated quoted field on line " + std::to_string(line));
  if (any || !field.empty()) {
    record.push_back(std::move(field));
    records.push_back(std::move(record));
  }

  Table table;
  if (records.empty()) return table;
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size())
      throw DatasetError(Code::unparseable, "row " + std::to_string(r + 1) + " has " +
                                                std::to_string(records[r].size()) + " fields, expected " +
                                                std::to_string(table.header.size()));
    table.rows.push_back(std::move(records[r]));
  }
  std::set<std::string> seen;
  for (const auto& h : table.header)
    if (!seen.insert(h).second) throw DatasetError(Code::unparseable, "duplicate column '" + h + "'");
  return table;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DatasetError(Code::unreadable, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  auto text = buf.str();
  if (text.starts_with("\xEF\xBB\xBF")) text.erase(0, 3);
  return parse_csv(text);
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

FeatureEncoder FeatureEncoder::fit(const Table& table, const std::string& target) {
  if (table.column(target) < 0)
    throw DatasetError(Code::missing_target_column, "target column '" + target + "' not found");
  FeatureEncoder enc;
  enc.target_ = target;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (table.header[c] == target) continue;
    Column col{table.header[c], true, 0.0, {}};
    std::vector<double> values;
    bool has_missing = false;
    for (const auto& row : table.rows) {
      const auto t = trim(row[c]);
      if (t.empty()) {
        has_missing = true;
        continue;
      }
      double v = 0.0;
      if (parse_number(t, v)) {
        values.push_back(v);
      } else {
        col.numeric = false;
      }
    }
    if (col.numeric) {
      col.median = median_of(std::move(values));
    } else {
      std::set<std::string> cats;
      for (const auto& row : table.rows) cats.insert(trim(row[c]));
      if (has_missing) cats.insert("");
      col.categories.assign(cats.begin(), cats.end());
    }
    enc.columns_.push_back(std::move(col));
  }
  return enc;
}

std::vector<std::string> FeatureEncoder::output_names() const {
  std::vector<std::string> names;
  for (const auto& col : columns_) {
    if (col.numeric) {
      names.push_back(col.name);
    } else {
      for (const auto& cat : col.categories) names.push_back(col.name + "=" + (cat.empty() ? "<missing>" : cat));
    }
  }
  return names;
}

std::vector<std::string> FeatureEncoder::missing_columns(const std::vector<std::string>& header) const {
  std::vector<std::string> out;
  for (const auto& col : columns_)
    if (std::find(header.begin(), header.end(), col.name) == header.end()) out.push_back(col.name);
  return out;
}

std::vector<std::string> FeatureEncoder::extra_columns(const std::vector<std::string>& header) const {
  std::vector<std::string> out;
  for (const auto& h : header) {
    if (h == target_) continue;
    const bool known = std::any_of(columns_.begin(), columns_.end(), [&](const Column& c) { return c.name == h; });
    if (!known) out.push_back(h);
  }
  return out;
}

Matrix FeatureEncoder::transform(const Table& table) const {
  const auto missing = missing_columns(table.header);
  if (!missing.empty()) throw DatasetError(Code::schema_mismatch, "missing column '" + missing.front() + "'");
  std::size_t width = 0;
  for (const auto& col : columns_) width += col.numeric ? 1 : col.categories.size();

  Matrix out(table.rows.size(), width);
  std::size_t offset = 0;
  for (const auto& col : columns_) {
    const auto src = static_cast<std::size_t>(table.column(col.name));
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const auto cell = trim(table.rows[r][src]);
      if (col.numeric) {
        double v = col.median;
        if (!cell.empty() && !parse_number(cell, v))
          throw DatasetError(Code::unparseable, "non-numeric value '" + cell + "' in column '" + col.name +
                                                    "' row " + std::to_string(r + 1));
        out(r, offset) = v;
      } else {
        const auto it = std::lower_bound(col.categories.begin(), col.categories.end(), cell);
        if (it != col.categories.end() && *it == cell) out(r, offset + static_cast<std::size_t>(it - col.categories.begin())) = 1.0;
      }
    }
    offset += col.numeric ? 1 : col.categories.size();
  }
  return out;
}

nlohmann::json FeatureEncoder::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns_) {
    nlohmann::json j{{"name", c.name}, {"numeric", c.numeric}};
    if (c.numeric) {
      j["median"] = c.median;
    } else {
      j["categories"] = c.categories;
    }
    cols.push_back(std::move(j));
  }
  return {{"target", target_}, {"columns", cols}};
}

FeatureEncoder FeatureEncoder::from_json(const nlohmann::json& j) {
  FeatureEncoder enc;
  enc.target_ = j.at("target").get<std::string>();
  for (const auto& c : j.at("columns")) {
    Column col{c.at("name").get<std::string>(), c.at("numeric").get<bool>(), 0.0, {}};
    if (col.numeric) {
      col.median = c.at("median").get<double>();
    } else {
      col.categories = c.at("categories").get<std::vector<std::string>>();
    }
    enc.columns_.push_back(std::move(col));
  }
  return enc;
}

void check_dataset(const Dataset& ds) {
  if (ds.rows() < 10)
    throw DatasetError(Code::too_few_rows, "too few rows: " + std::to_string(ds.rows()) + " (need at least 10)");
  if (ds.class_count() < 2) throw DatasetError(Code::too_few_classes, "target has fewer than 2 classes");
  std::vector<std::size_t> counts(ds.class_count(), 0);
  for (int y : ds.labels) ++counts[static_cast<std::size_t>(y)];
  for (std::size_t c = 0; c < counts.size(); ++c)
    if (counts[c] < 2)
      throw DatasetError(Code::class_too_small, "class '" + ds.class_names[c] + "' has fewer than 2 instances");
}

Dataset make_dataset(const Table& table, const FeatureEncoder& encoder) {
  const auto target = table.column(encoder.target());
  if (target < 0)
    throw DatasetError(Code::missing_target_column, "target column '" + encoder.target() + "' not found");
  Dataset ds;
  std::set<std::string> names;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto label = trim(table.rows[r][static_cast<std::size_t>(target)]);
    if (label.empty())
      throw DatasetError(Code::missing_target_value, "missing target value on row " + std::to_string(r + 1));
    names.insert(label);
  }
  ds.class_names.assign(names.begin(), names.end());
  for (const auto& row : table.rows) {
    const auto label = trim(row[static_cast<std::size_t>(target)]);
    ds.labels.push_back(static_cast<int>(
        std::lower_bound(ds.class_names.begin(), ds.class_names.end(), label) - ds.class_names.begin()));
  }
  ds.features = encoder.transform(table);
  ds.column_names = encoder.output_names();
  check_dataset(ds);
  return ds;
}

Dataset load_dataset(const std::filesystem::path& path, const std::string& target) {
  const auto table = read_csv(path);
  if (table.header.empty()) throw DatasetError(Code::too_few_rows, "too few rows: file is empty");
  return make_dataset(table, FeatureEncoder::fit(table, target));
}

Dataset take_rows(const Dataset& ds, std::span<const std::size_t> rows) {
  Dataset out;
  out.features = ds.features.select_rows(rows);
  out.labels.reserve(rows.size());
  for (auto r : rows) out.labels.push_back(ds.labels[r]);
  out.class_names = ds.class_names;
  out.column_names = ds.column_names;
  return out;
}

std::vector<std::size_t> CVSplits::train_rows(std::size_t fold) const {
  std::vector<std::size_t> out;
  for (std::size_t f = 0; f < folds.size(); ++f)
    if (f != fold) out.insert(out.end(), folds[f].begin(), folds[f].end());
  std::sort(out.begin(), out.end());
  return out;
}

CVSplits make_splits(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw DatasetError(Code::cannot_stratify, "cannot stratify: need at least 2 folds");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [label, rows] : by_class)
    if (rows.size() < k)
      throw DatasetError(Code::cannot_stratify, "cannot stratify: class " + std::to_string(label) + " has " +
                                                    std::to_string(rows.size()) + " rows for " + std::to_string(k) +
                                                    " folds");
  Rng rng(seed);
  CVSplits splits;
  splits.folds.resize(k);
  std::size_t next = 0;
  for (auto& [label, rows] : by_class) {
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.index(i)]);
    for (auto r : rows) {
      splits.folds[next].push_back(r);
      next = (next + 1) % k;
    }
  }
  for (auto& f : splits.folds) std::sort(f.begin(), f.end());
  return splits;
}

namespace {

// All rows in a stratified interleaved order; any prefix is a stratified sample.
std::vector<std::size_t> stratified_order(std::span<const int> labels, std::uint64_t seed) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(seed);
  struct Keyed {
    double quantile;
    int label;
    std::size_t row;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(labels.size());
  for (auto& [label, rows] : by_class) {
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.index(i)]);
    for (std::size_t j = 0; j < rows.size(); ++j)
      keyed.push_back({(static_cast<double>(j) + 0.5) / static_cast<double>(rows.size()), label, rows[j]});
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    return a.quantile != b.quantile ? a.quantile < b.quantile : a.label < b.label;
  });
  std::vector<std::size_t> order;
  order.reserve(keyed.size());
  for (const auto& k : keyed) order.push_back(k.row);
  return order;
}

}  // namespace

std::vector<std::size_t> subsample_rows(std::span<const int> labels, std::size_t class_count, double fraction,
                                        std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw DatasetError(Code::fidelity_too_low, "fidelity fraction must lie in (0, 1]");
  std::vector<std::size_t> rows;
  if (fraction == 1.0) {
    rows.resize(labels.size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
  }
  const auto n = labels.size();
  auto take = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  take = std::clamp<std::size_t>(take, 1, n);
  auto order = stratified_order(labels, seed);
  rows.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take));

  std::vector<std::size_t> total(class_count, 0), kept(class_count, 0);
  for (int y : labels) ++total[static_cast<std::size_t>(y)];
  for (auto r : rows) ++kept[static_cast<std::size_t>(labels[r])];
  for (std::size_t c = 0; c < class_count; ++c)
    if (total[c] > 0 && kept[c] < 2)
      throw DatasetError(Code::fidelity_too_low, "fidelity too low: class " + std::to_string(c) + " keeps " +
                                                     std::to_string(kept[c]) + " rows");
  std::sort(rows.begin(), rows.end());
  return rows;
}

Dataset subsample(const Dataset& ds, double fraction, std::uint64_t seed) {
  if (fraction == 1.0) return ds;
  const auto rows = subsample_rows(ds.labels, ds.class_count(), fraction, seed);
  return take_rows(ds, rows);
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_split(std::span<const int> labels,
                                                                            double holdout_fraction,
                                                                            std::uint64_t seed) {
  const auto order = stratified_order(labels, seed);
  const auto n = labels.size();
  const auto n_train = static_cast<std::size_t>(std::ceil((1.0 - holdout_fraction) * static_cast<double>(n) - 1e-9));
  std::vector<std::size_t> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

}  // namespace pipesearch
