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

#include <cmath>

#include "doctest.h"
#include "pipesearch/evaluation.hpp"
#include "pipesearch/learners.hpp"
#include "pipesearch/rng.hpp"
#include "support.hpp"

using namespace pipesearch;

namespace {

Pipeline single(const std::string& id, Params params = {}) { return Pipeline{{Step{id, std::move(params)}}}; }

Dataset sixty_forty() {
  Dataset ds;
  ds.features = Matrix(100, 1);
  for (std::size_t r = 0; r < 100; ++r) {
    ds.features(r, 0) = static_cast<double>(r % 7);
    ds.labels.push_back(r % 5 < 3 ? 0 : 1);
  }
  ds.class_names = {"a", "b"};
  ds.column_names = {"x"};
  return ds;
}

}  // namespace

TEST_CASE("majority baseline on 60/40 data scores 0.6") {
  const auto ds = sixty_forty();
  const auto r = evaluate(single("majority"), ds, 1.0, {.folds = 5, .metric = Metric::accuracy, .timeout_s = 10});
  REQUIRE(r.ok());
  CHECK(r.objectives[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(r.objectives[1] == -1.0);
  CHECK(r.error_msg.empty());
  CHECK(r.duration_s >= 0.0);
  REQUIRE(r.predictions);
  CHECK(r.predictions->rows() == 100);
}

TEST_CASE("a throwing pipeline yields an error result") {
  testsupport::register_test_components();
  const auto ds = sixty_forty();
  const auto r = evaluate(single("always-fail"), ds, 1.0, {});
  CHECK(r.status == EvalStatus::error);
  CHECK(r.objectives.empty());
  CHECK_FALSE(r.predictions);
  CHECK_FALSE(r.error_msg.empty());
}

TEST_CASE("an evaluation past its timeout reports timeout within the grace period") {
  testsupport::register_test_components();
  const auto ds = sixty_forty();
  const auto r = evaluate(single("sleepy", {{"ms", std::int64_t{5000}}}), ds, 1.0, {.timeout_s = 0.2});
  CHECK(r.status == EvalStatus::timeout);
  CHECK(r.objectives.empty());
  CHECK(r.duration_s < 0.2 + 2.0);
}

TEST_CASE("external cancellation also yields timeout") {
  testsupport::register_test_components();
  const auto ds = sixty_forty();
  auto token = CancelToken::until(Clock::now() + std::chrono::hours(1));
  token.cancel();
  const auto r = evaluate(single("sleepy", {{"ms", std::int64_t{5000}}}), ds, 1.0, {.timeout_s = 10}, token);
  CHECK(r.status == EvalStatus::timeout);
}

TEST_CASE("1-NN is exact when every validation row has a twin in training") {
  // rows i and i + n are identical; each fold validates on one copy and trains on the other
  const auto base = testsupport::blobs(40, 3, 2, 4, 3.0);
  Dataset ds = base;
  ds.features = Matrix(80, 2);
  ds.labels.clear();
  for (std::size_t copy = 0; copy < 2; ++copy)
    for (std::size_t r = 0; r < 40; ++r) {
      ds.features(copy * 40 + r, 0) = base.features(r, 0);
      ds.features(copy * 40 + r, 1) = base.features(r, 1);
      ds.labels.push_back(base.labels[r]);
    }
  CVSplits splits;
  splits.folds.resize(2);
  for (std::size_t r = 0; r < 40; ++r) {
    splits.folds[0].push_back(r < 20 ? r : r + 40);
    splits.folds[1].push_back(r < 20 ? r + 40 : r);
  }
  const auto r = evaluate(single("knn", {{"k", std::int64_t{1}}, {"weights", std::string("uniform")}}), ds, splits, 1.0,
                          {.folds = 2, .metric = Metric::accuracy, .timeout_s = 10});
  REQUIRE(r.ok());
  CHECK(r.objectives[0] == 1.0);
}

TEST_CASE("out-of-fold predictions line up with rows and sit on the simplex") {
  const auto ds = testsupport::blobs(150, 3, 3, 21, 0.8);
  const Pipeline p{{{"standard-scaler", {}}, {"logistic-regression", {{"l2", 0.01}, {"max_iter", std::int64_t{100}}}}}};
  for (double fidelity : {1.0, 0.5}) {
    const auto r = evaluate(p, ds, fidelity, {.folds = 5, .metric = Metric::neg_log_loss, .timeout_s = 30, .seed = 2});
    REQUIRE(r.ok());
    CHECK(r.objectives[1] == -2.0);
    std::vector<int> truth = ds.labels;
    double loss = 0.0;
    for (std::size_t row = 0; row < ds.rows(); ++row) {
      double sum = 0.0;
      for (double v : r.predictions->row(row)) sum += v;
      REQUIRE(std::abs(sum - 1.0) < 1e-9);
      loss += std::log(std::max(1e-15, (*r.predictions)(row, static_cast<std::size_t>(truth[row]))));
    }
    // equal fold sizes, so the mean of fold losses equals the pooled loss
    CHECK(r.objectives[0] == doctest::Approx(loss / 150.0).epsilon(1e-9));
  }
}

TEST_CASE("evaluation is deterministic for a fixed seed") {
  const auto ds = testsupport::blobs(120, 2, 4, 8, 2.5);
  const Pipeline p{{{"random-forest",
                     {{"n_estimators", std::int64_t{9}}, {"max_depth", std::int64_t{6}}, {"max_features", std::string("sqrt")}}}}};
  const EvalConfig cfg{.folds = 4, .metric = Metric::macro_f1, .timeout_s = 30, .seed = 77};
  const auto a = evaluate(p, ds, 0.6, cfg);
  const auto b = evaluate(p, ds, 0.6, cfg);
  REQUIRE(a.ok());
  CHECK(a.objectives == b.objectives);
  CHECK(*a.predictions == *b.predictions);
}

TEST_CASE("unstratifiable data is reported, not thrown") {
  Dataset ds = sixty_forty();
  ds.labels[0] = 2;
  ds.class_names.push_back("c");
  const auto r = evaluate(single("majority"), ds, 1.0, {.folds = 5});
  CHECK(r.status == EvalStatus::error);
}

TEST_CASE("status names round-trip") {
  for (auto s : {EvalStatus::ok, EvalStatus::timeout, EvalStatus::error}) CHECK(status_from_name(status_name(s)) == s);
  CHECK_THROWS(status_from_name("done"));
}
