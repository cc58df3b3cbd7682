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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "pipesearch/errors.hpp"
#include "pipesearch/matrix.hpp"

namespace pipesearch {

class DatasetError : public Error {
 public:
  enum class Code {
    unreadable,
    unparseable,
    missing_target_column,
    missing_target_value,
    too_few_rows,
    too_few_classes,
    class_too_small,
    cannot_stratify,
    fidelity_too_low,
    schema_mismatch,
  };

  DatasetError(Code code, const std::string& message) : Error(message), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// Raw CSV contents; empty cells ("") are missing values.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::ptrdiff_t column(const std::string& name) const;
};

Table read_csv(const std::filesystem::path& path);
Table parse_csv(const std::string& text);
std::string csv_escape(const std::string& field);

struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::vector<std::string> class_names;
  std::vector<std::string> column_names;

  std::size_t rows() const { return labels.size(); }
  std::size_t class_count() const { return class_names.size(); }
};

// Load-time column encoding: median imputation for numeric columns, one-hot
// (with "missing" as its own category) for everything else. Fit once on the
// training table and reused verbatim at prediction time.
class FeatureEncoder {
 public:
  struct Column {
    std::string name;
    bool numeric = true;
    double median = 0.0;
    std::vector<std::string> categories;  // sorted; "" stands for missing
  };

  static FeatureEncoder fit(const Table& table, const std::string& target);

  Matrix transform(const Table& table) const;
  std::vector<std::string> output_names() const;
  const std::vector<Column>& columns() const { return columns_; }
  const std::string& target() const { return target_; }

  // Names of required columns absent from `header`, and of unexpected extra
  // columns (the target column is always tolerated).
  std::vector<std::string> missing_columns(const std::vector<std::string>& header) const;
  std::vector<std::string> extra_columns(const std::vector<std::string>& header) const;

  nlohmann::json to_json() const;
  static FeatureEncoder from_json(const nlohmann::json& j);

 private:
  std::string target_;
  std::vector<Column> columns_;
};

// Builds a validated dataset from `table` using `encoder`.
Dataset make_dataset(const Table& table, const FeatureEncoder& encoder);
Dataset load_dataset(const std::filesystem::path& path, const std::string& target);
void check_dataset(const Dataset& ds);

Dataset take_rows(const Dataset& ds, std::span<const std::size_t> rows);

// Stratified k-fold partition. folds[i] holds the validation rows of fold i.
struct CVSplits {
  std::vector<std::vector<std::size_t>> folds;

  std::vector<std::size_t> train_rows(std::size_t fold) const;
};

CVSplits make_splits(std::span<const int> labels, std::size_t k, std::uint64_t seed);

// Rows drawn for a stratified subsample of ceil(fraction * n) rows, in ascending
// order. Smaller fractions yield subsets of larger ones for the same seed.
std::vector<std::size_t> subsample_rows(std::span<const int> labels, std::size_t class_count,
                                        double fraction, std::uint64_t seed);
Dataset subsample(const Dataset& ds, double fraction, std::uint64_t seed);

// Stratified train/holdout split; returns {train rows, holdout rows}.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> holdout_split(
    std::span<const int> labels, double holdout_fraction, std::uint64_t seed);

}  // namespace pipesearch
