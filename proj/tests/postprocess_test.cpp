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

#include <chrono>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pipesearch/postprocess.hpp"
#include "support.hpp"

using namespace pipesearch;

namespace {

Pipeline chain(std::size_t length) {
  Pipeline p;
  const char* transformers[] = {"standard-scaler", "min-max-scaler"};
  for (std::size_t i = 0; i + 1 < length; ++i) p.steps.push_back({transformers[i], {}});
  p.steps.push_back({"majority", {}});
  return p;
}

EvaluationResult scored(std::uint64_t seq, double score, std::size_t length = 1, int start_ms = 0) {
  EvaluationResult r;
  r.seq = seq;
  r.pipeline = chain(length);
  r.canonical = canonical_encode(r.pipeline) + "#" + std::to_string(seq);
  r.status = EvalStatus::ok;
  r.objectives = {score, -static_cast<double>(length)};
  r.start_time = WallClock::time_point{} + std::chrono::milliseconds(start_ms);
  return r;
}

EvaluationResult with_predictions(std::uint64_t seq, const std::vector<double>& p1) {
  auto r = scored(seq, 0.0, 1, static_cast<int>(seq));
  auto m = std::make_shared<Matrix>(p1.size(), 2);
  for (std::size_t i = 0; i < p1.size(); ++i) {
    (*m)(i, 0) = 1.0 - p1[i];
    (*m)(i, 1) = p1[i];
  }
  r.predictions = m;
  return r;
}

}  // namespace

TEST_CASE("select_best picks the top score, then the shorter pipeline") {
  std::vector<EvaluationResult> lib = {scored(1, 0.7, 1), scored(2, 0.9, 3), scored(3, 0.9, 2)};
  CHECK(select_best(lib).seq == 3);
  CHECK(select_best(std::vector<EvaluationResult>{scored(1, 0.2)}).seq == 1);

  std::vector<EvaluationResult> same = {scored(1, 0.9, 2, 50), scored(2, 0.9, 2, 10)};
  CHECK(select_best(same).seq == 2);

  auto failed = scored(1, 0.9);
  failed.status = EvalStatus::error;
  failed.objectives.clear();
  CHECK_THROWS_WITH(select_best(std::vector<EvaluationResult>{failed}), "search produced no usable pipeline");
  CHECK_THROWS(select_best(std::vector<EvaluationResult>{}));
}

TEST_CASE("select_best prefers the highest fidelity present") {
  auto low = scored(1, 0.99);
  low.fidelity = 1.0 / 3.0;
  std::vector<EvaluationResult> lib = {low, scored(2, 0.5)};
  CHECK(select_best(lib).seq == 2);
  lib.pop_back();
  CHECK(select_best(lib).seq == 1);
}

TEST_CASE("usable library excludes cached, failed and low-fidelity results") {
  std::vector<EvaluationResult> lib = {with_predictions(1, {0.5}), with_predictions(2, {0.5}), with_predictions(3, {0.5}),
                                       with_predictions(4, {0.5})};
  lib[1].cached = true;
  lib[2].status = EvalStatus::timeout;
  lib[3].fidelity = 0.5;
  CHECK(usable_library(lib) == std::vector<std::size_t>{0});
}

TEST_CASE("ensemble of one model") {
  std::vector<EvaluationResult> lib = {with_predictions(1, {0.9, 0.2, 0.4})};
  const auto e = ensemble_select(lib, 5, Metric::accuracy, std::vector<int>{1, 0, 0});
  REQUIRE(e.members.size() == 1);
  CHECK(e.members[0].weight == 1.0);
  CHECK(e.picks == std::vector<std::size_t>{0, 0, 0, 0, 0});
}

TEST_CASE("ensemble log-loss hand example") {
  const std::vector<int> truth = {1, 1, 0};
  std::vector<EvaluationResult> lib = {with_predictions(1, {0.9, 0.6, 0.4}), with_predictions(2, {0.6, 0.9, 0.6}),
                                       with_predictions(3, {0.1, 0.2, 0.1})};
  const auto e = ensemble_select(lib, 2, Metric::neg_log_loss, truth);
  CHECK(e.picks == std::vector<std::size_t>{0, 0});
  CHECK(e.step_scores[0] == doctest::Approx(-0.3757).epsilon(1e-3));
  CHECK(e.step_scores[1] == e.step_scores[0]);
  REQUIRE(e.members.size() == 1);
  CHECK(e.members[0].library_index == 0);
  CHECK(e.members[0].weight == 1.0);

  // the rejected second step: M1 + M2 averages to p1 = [.75, .75, .5]
  Matrix blend(3, 2);
  const double p1[] = {0.75, 0.75, 0.5};
  for (std::size_t i = 0; i < 3; ++i) {
    blend(i, 0) = 1 - p1[i];
    blend(i, 1) = p1[i];
  }
  CHECK(score(blend, truth, Metric::neg_log_loss) == doctest::Approx(-0.4231).epsilon(1e-3));
}

TEST_CASE("ensemble selection errors") {
  std::vector<EvaluationResult> lib = {with_predictions(1, {0.9})};
  CHECK_THROWS_WITH(ensemble_select(lib, 0, Metric::accuracy, std::vector<int>{1}), "target size must be >= 1");
  CHECK_THROWS(ensemble_select(std::vector<EvaluationResult>{}, 3, Metric::accuracy, std::vector<int>{1}));
  CHECK_THROWS(ensemble_select(lib, 3, Metric::accuracy, std::vector<int>{1, 0}));
}

TEST_CASE("ensemble selection matches the brute-force oracle") {
  const auto check = oracles::ensemble_fixtures(314, 100);
  INFO(check.detail);
  CHECK(check.ok);
  CHECK(check.count == 100);
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto more = oracles::ensemble_fixtures(seed, 50);
    INFO("seed " << seed << ": " << more.detail);
    CHECK(more.ok);
  }
}

TEST_CASE("a raised stop flag ends selection after the first step") {
  std::vector<EvaluationResult> lib = {with_predictions(1, {0.9, 0.2}), with_predictions(2, {0.6, 0.4})};
  std::atomic<bool> stop{true};
  const auto e = ensemble_select(lib, 10, Metric::accuracy, std::vector<int>{1, 0}, &stop);
  CHECK(e.picks.size() == 1);
  CHECK(e.kept == 1);
}

TEST_CASE("ensemble_predict averages member probabilities") {
  // majority models trained on a single class predict one-hot rows
  Matrix x(4, 1);
  const auto zero = FittedPipeline::fit(chain(1), x, std::vector<int>{0, 0, 0, 0}, 2, {});
  const auto one = FittedPipeline::fit(chain(1), x, std::vector<int>{1, 1, 1, 1}, 2, {});
  const std::vector<const FittedPipeline*> both = {&zero, &one};
  const auto p = ensemble_predict(std::vector<double>{0.5, 0.5}, both, Matrix(3, 1));
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(p(r, 0) == 0.5);
    CHECK(p(r, 1) == 0.5);
  }
  const std::vector<const FittedPipeline*> single = {&one};
  CHECK(ensemble_predict(std::vector<double>{1.0}, single, Matrix(2, 1)) == one.predict_proba(Matrix(2, 1)));
  CHECK_THROWS(ensemble_predict(std::vector<double>{}, std::vector<const FittedPipeline*>{}, Matrix(2, 1)));
}

TEST_CASE("refitting the best pipeline is reproducible and round-trips") {
  const auto table = testsupport::blobs_table(90, 3, 3, 12, 1.0);
  const auto encoder = FeatureEncoder::fit(table, "y");
  const auto ds = make_dataset(table, encoder);
  const Pipeline p{{{"standard-scaler", {}}, {"knn", {{"k", std::int64_t{3}}, {"weights", std::string("uniform")}}}}};
  const auto fitted = fit_final(p, ds, 5);
  const auto manual = FittedPipeline::fit(p, ds.features, ds.labels, ds.class_count(), FitContext{5, {}});
  CHECK(fitted.predict_proba(ds.features) == manual.predict_proba(ds.features));

  Model model;
  model.kind = "best";
  model.encoder = encoder;
  model.class_names = ds.class_names;
  model.members.push_back({1.0, fitted});
  const auto dir = testsupport::scratch_dir("postprocess-model");
  model.save(dir / "model.json");
  const auto loaded = Model::load(dir / "model.json");
  CHECK(loaded.kind == "best");
  CHECK(loaded.class_names == ds.class_names);
  CHECK(loaded.predict_proba(table) == model.predict_proba(table));
  CHECK(loaded.predict_proba(ds.features) == fitted.predict_proba(ds.features));

  auto doc = model.to_json();
  CHECK(doc.at("format_version") == kModelFormatVersion);
  doc["format_version"] = 99;
  CHECK_THROWS(Model::from_json(doc));
}

TEST_CASE("majority refit predicts class frequencies") {
  Dataset ds = testsupport::blobs(10, 2, 1, 3);
  ds.labels = {0, 0, 0, 1, 1, 1, 1, 0, 1, 1};  // 4 zeros, 6 ones
  const auto fitted = fit_final(chain(1), ds, 0);
  const auto p = fitted.predict_proba(ds.features);
  for (std::size_t r = 0; r < 10; ++r) {
    CHECK(p(r, 0) == doctest::Approx(0.4));
    CHECK(p(r, 1) == doctest::Approx(0.6));
  }
}

TEST_CASE("ensemble model drops members that fail to refit") {
  testsupport::register_test_components();
  const auto table = testsupport::blobs_table(60, 2, 2, 4, 1.0);
  const auto encoder = FeatureEncoder::fit(table, "y");
  const auto ds = make_dataset(table, encoder);

  std::vector<EvaluationResult> lib = {scored(1, 0.8), scored(2, 0.7)};
  lib[1].pipeline = Pipeline{{{"always-fail", {}}}};
  Ensemble e;
  e.members = {{0, "majority()", 3, 0.6}, {1, "always-fail()", 2, 0.4}};
  std::vector<std::string> warnings;
  const auto model = build_ensemble_model(e, lib, ds, encoder, 1, {}, warnings);
  REQUIRE(model.members.size() == 1);
  CHECK(model.members[0].weight == doctest::Approx(1.0));
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("always-fail") != std::string::npos);

  Ensemble hopeless;
  hopeless.members = {{1, "always-fail()", 1, 1.0}};
  CHECK_THROWS(build_ensemble_model(hopeless, lib, ds, encoder, 1, {}, warnings));

  // a raised stop keeps the first member and skips the rest
  std::vector<EvaluationResult> two = {scored(1, 0.8), scored(2, 0.7)};
  Ensemble pair;
  pair.members = {{0, "a", 1, 0.5}, {1, "b", 1, 0.5}};
  std::atomic<bool> stop{true};
  std::vector<std::string> w2;
  const auto partial = build_ensemble_model(pair, two, ds, encoder, 1, {}, w2, &stop);
  CHECK(partial.members.size() == 1);
  CHECK(partial.members[0].weight == doctest::Approx(1.0));

  const auto proba = partial.predict_proba(table);
  for (std::size_t r = 0; r < proba.rows(); ++r) CHECK(std::abs(proba(r, 0) + proba(r, 1) - 1.0) < 1e-9);
}
