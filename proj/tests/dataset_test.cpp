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

#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "pipesearch/dataset.hpp"
#include "support.hpp"

using namespace pipesearch;
namespace fs = std::filesystem;

namespace {

DatasetError::Code load_error(const std::string& csv, const std::string& target = "y") {
  const auto dir = testsupport::scratch_dir("dataset");
  testsupport::write_text(dir / "d.csv", csv);
  try {
    load_dataset(dir / "d.csv", target);
  } catch (const DatasetError& e) {
    return e.code();
  }
  FAIL("expected a DatasetError");
  return DatasetError::Code::unreadable;
}

std::string rows_csv(std::size_t n, const std::string& extra = "") {
  std::string s = "x,y\n";
  for (std::size_t i = 0; i < n; ++i) s += std::to_string(i) + "," + (i % 2 ? "a" : "b") + "\n";
  return s + extra;
}

std::vector<int> labels_with(std::vector<std::size_t> counts, std::uint64_t seed) {
  std::vector<int> y;
  for (std::size_t c = 0; c < counts.size(); ++c) y.insert(y.end(), counts[c], static_cast<int>(c));
  Rng rng(seed);
  for (std::size_t i = y.size(); i > 1; --i) std::swap(y[i - 1], y[rng.index(i)]);
  return y;
}

}  // namespace

TEST_CASE("parse_csv handles quotes, CRLF and empty cells") {
  const auto t = parse_csv("a,b,c\r\n\"x,1\",\"say \"\"hi\"\"\",\r\n2,,z\r\n");
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0] == std::vector<std::string>{"x,1", "say \"hi\"", ""});
  CHECK(t.rows[1] == std::vector<std::string>{"2", "", "z"});
  CHECK(csv_escape("a,b") == "\"a,b\"");
  CHECK(csv_escape("plain") == "plain");
  CHECK_THROWS_AS(parse_csv("a,b\n1,2,3\n"), DatasetError);
}

TEST_CASE("read_csv strips a byte order mark") {
  const auto dir = testsupport::scratch_dir("bom");
  testsupport::write_text(dir / "b.csv", "\xEF\xBB\xBFx,y\n1,a\n");
  CHECK(read_csv(dir / "b.csv").header[0] == "x");
}

TEST_CASE("load errors are distinct and named") {
  CHECK(load_error("x,y\n1,a\n2,b\n3,a\n") == DatasetError::Code::too_few_rows);
  CHECK(load_error(rows_csv(12), "label") == DatasetError::Code::missing_target_column);
  CHECK(load_error(rows_csv(12, "5,c\n")) == DatasetError::Code::class_too_small);
  CHECK(load_error(rows_csv(12, "5,\n")) == DatasetError::Code::missing_target_value);
  CHECK(load_error("x,y\n1,a,3\n") == DatasetError::Code::unparseable);
  std::string one_class = "x,y\n";
  for (int i = 0; i < 12; ++i) one_class += std::to_string(i) + ",a\n";
  CHECK(load_error(one_class) == DatasetError::Code::too_few_classes);
  CHECK_THROWS_WITH(load_dataset("/nonexistent/file.csv", "y"), doctest::Contains("/nonexistent/file.csv"));

  const auto dir = testsupport::scratch_dir("few");
  testsupport::write_text(dir / "d.csv", "x,y\n1,a\n2,b\n3,a\n");
  CHECK_THROWS_WITH(load_dataset(dir / "d.csv", "y"), doctest::Contains("too few rows"));
}

TEST_CASE("median imputation and one-hot encoding on the fixture") {
  const auto table = read_csv(testsupport::fixture("median.csv"));
  const auto enc = FeatureEncoder::fit(table, "y");
  const auto ds = make_dataset(table, enc);
  CHECK(ds.rows() == 11);
  CHECK(ds.class_names == std::vector<std::string>{"no", "yes"});
  CHECK(ds.column_names ==
        std::vector<std::string>{"a", "b", "color=<missing>", "color=blue", "color=red"});
  CHECK(ds.features(4, 0) == 5.0);  // the missing cell of column a
  CHECK(ds.features(0, 4) == 1.0);
  CHECK(ds.features(0, 3) == 0.0);
  CHECK(ds.features(5, 2) == 1.0);

  const auto again = FeatureEncoder::from_json(enc.to_json());
  CHECK(again.transform(table) == ds.features);
  Table shuffled;
  shuffled.header = {"color", "y", "b", "a"};
  shuffled.rows = {{"purple", "no", "1.0", ""}};
  const auto x = enc.transform(shuffled);
  CHECK(x(0, 0) == 5.0);
  CHECK(x(0, 1) == 1.0);
  CHECK(x(0, 2) + x(0, 3) + x(0, 4) == 0.0);
  CHECK(enc.missing_columns({"a", "y"}) == std::vector<std::string>{"b", "color"});
  CHECK(enc.extra_columns({"a", "b", "color", "y", "zzz"}) == std::vector<std::string>{"zzz"});
}

TEST_CASE("two-category column yields two indicators") {
  std::string csv = "c,y\n";
  for (int i = 0; i < 12; ++i) csv += std::string(i % 3 ? "a" : "b") + "," + (i % 2 ? "p" : "q") + "\n";
  const auto t = parse_csv(csv);
  const auto ds = make_dataset(t, FeatureEncoder::fit(t, "y"));
  CHECK(ds.features.cols() == 2);
  CHECK(ds.column_names == std::vector<std::string>{"c=a", "c=b"});
}

TEST_CASE("make_splits on a balanced 10-row dataset") {
  const std::vector<int> y = {0, 1, 0, 1, 0, 1, 0, 1, 0, 1};
  const auto s = make_splits(y, 2, 1);
  REQUIRE(s.folds.size() == 2);
  for (const auto& fold : s.folds) {
    CHECK(fold.size() == 5);
    const auto ones = std::count_if(fold.begin(), fold.end(), [&](std::size_t r) { return y[r] == 1; });
    CHECK((ones == 2 || ones == 3));
  }
  const auto again = make_splits(y, 2, 1);
  CHECK(again.folds == s.folds);
  CHECK_THROWS_WITH(make_splits(std::vector<int>{0, 0, 0, 1}, 2, 1), doctest::Contains("cannot stratify"));
}

TEST_CASE("make_splits is a stratified partition") {
  Rng meta(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t classes = 2 + meta.index(4);
    const std::size_t k = 2 + meta.index(5);
    std::vector<std::size_t> counts;
    for (std::size_t c = 0; c < classes; ++c) counts.push_back(k + meta.index(40));
    const auto y = labels_with(counts, meta.next_u64());
    const auto s = make_splits(y, k, meta.next_u64());
    REQUIRE(s.folds.size() == k);
    std::vector<int> seen(y.size(), 0);
    for (std::size_t f = 0; f < k; ++f) {
      std::vector<std::size_t> per(classes, 0);
      for (auto r : s.folds[f]) {
        ++seen[r];
        ++per[static_cast<std::size_t>(y[r])];
      }
      for (std::size_t c = 0; c < classes; ++c) {
        const double expected = static_cast<double>(counts[c]) / static_cast<double>(k);
        REQUIRE(std::abs(static_cast<double>(per[c]) - expected) < 1.0);
      }
      const auto train = s.train_rows(f);
      REQUIRE(train.size() + s.folds[f].size() == y.size());
    }
    REQUIRE(std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; }));
  }
}

TEST_CASE("subsample identity, size and ratios") {
  auto y = labels_with({60, 40}, 5);
  CHECK(subsample_rows(y, 2, 1.0, 3).size() == 100);
  const auto half = subsample_rows(y, 2, 0.5, 3);
  CHECK(half.size() == 50);
  const auto ones = std::count_if(half.begin(), half.end(), [&](std::size_t r) { return y[r] == 1; });
  CHECK(std::abs(static_cast<double>(ones) - 20.0) <= 1.0);
  CHECK(std::is_sorted(half.begin(), half.end()));

  const auto ds = testsupport::blobs(40, 2, 3, 1);
  const auto same = subsample(ds, 1.0, 9);
  CHECK(same.features == ds.features);
  CHECK(same.labels == ds.labels);
}

TEST_CASE("subsamples are nested across fractions") {
  Rng meta(3);
  for (int trial = 0; trial < 100; ++trial) {
    const auto y = labels_with({20 + meta.index(50), 20 + meta.index(50), 20 + meta.index(30)}, meta.next_u64());
    const auto seed = meta.next_u64();
    const auto a = subsample_rows(y, 3, 0.25, seed);
    const auto b = subsample_rows(y, 3, 0.5, seed);
    const auto c = subsample_rows(y, 3, 1.0, seed);
    REQUIRE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    REQUIRE(std::includes(c.begin(), c.end(), b.begin(), b.end()));
  }
  const auto y = labels_with({50, 3}, 1);
  CHECK_THROWS_WITH(subsample_rows(y, 2, 0.1, 1), doctest::Contains("fidelity too low"));
}

TEST_CASE("holdout_split is a stratified partition") {
  const auto y = labels_with({30, 20, 10}, 8);
  const auto [train, test] = holdout_split(y, 0.25, 4);
  std::set<std::size_t> all(train.begin(), train.end());
  for (auto r : test) CHECK(all.insert(r).second);
  CHECK(all.size() == y.size());
  std::map<int, int> per;
  for (auto r : test) ++per[y[r]];
  CHECK(std::abs(per[0] - 7.5) <= 1.0);
  CHECK(std::abs(per[2] - 2.5) <= 1.0);
}

TEST_CASE("bundled datasets load") {
  for (const auto& [file, target, rows, classes] :
       std::vector<std::tuple<std::string, std::string, std::size_t, std::size_t>>{
           {"blobs.csv", "species", 150, 3}, {"moons.csv", "moon", 500, 2}, {"shop.csv", "plan", 1000, 4}}) {
    const auto ds = load_dataset(testsupport::data_file(file), target);
    CHECK(ds.rows() == rows);
    CHECK(ds.class_count() == classes);
  }
}
