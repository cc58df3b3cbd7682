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

#include "pipesearch/evaluation.hpp"

#include <cmath>

#include "pipesearch/learners.hpp"
#include "pipesearch/rng.hpp"

namespace pipesearch {

std::string_view status_name(EvalStatus status) {
  switch (status) {
    case EvalStatus::ok: return "ok";
    case EvalStatus::timeout: return "timeout";
    case EvalStatus::error: return "error";
  }
  return "error";
}

EvalStatus status_from_name(std::string_view name) {
  if (name == "ok") return EvalStatus::ok;
  if (name == "timeout") return EvalStatus::timeout;
  if (name == "error") return EvalStatus::error;
  throw Error("unknown evaluation status '" + std::string(name) + "'");
}

EvaluationResult evaluate(const Pipeline& pipeline, const Dataset& ds, const CVSplits& splits, double fidelity,
                          const EvalConfig& cfg, const CancelToken& cancel) {
  EvaluationResult result;
  result.pipeline = pipeline;
  result.canonical = canonical_encode(pipeline);
  result.fidelity = fidelity;
  result.start_time = WallClock::now();
  const auto started = Clock::now();
  const auto deadline = started + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(cfg.timeout_s));
  const CancelToken token = cancel.sooner(deadline);

  try {
    const auto classes = ds.class_count();
    auto oof = std::make_shared<Matrix>(ds.rows(), classes);
    double total = 0.0;
    for (std::size_t f = 0; f < splits.folds.size(); ++f) {
      token.check();
      auto train = splits.train_rows(f);
      if (fidelity < 1.0) {
        std::vector<int> train_labels;
        train_labels.reserve(train.size());
        for (auto r : train) train_labels.push_back(ds.labels[r]);
        const auto keep = subsample_rows(train_labels, classes, fidelity, cfg.seed);
        std::vector<std::size_t> picked;
        picked.reserve(keep.size());
        for (auto i : keep) picked.push_back(train[i]);
        train = std::move(picked);
      }
      const auto& valid = splits.folds[f];
      std::vector<int> y_train, y_valid;
      for (auto r : train) y_train.push_back(ds.labels[r]);
      for (auto r : valid) y_valid.push_back(ds.labels[r]);

      const auto fitted = FittedPipeline::fit(pipeline, ds.features.select_rows(train), y_train, classes,
                                              FitContext{derive_seed(cfg.seed, f), token});
      const auto probs = fitted.predict_proba(ds.features.select_rows(valid), token);
      for (std::size_t i = 0; i < valid.size(); ++i) {
        const auto src = probs.row(i);
        std::copy(src.begin(), src.end(), oof->row(valid[i]).begin());
      }
      total += score(probs, y_valid, cfg.metric);
    }
    const double mean = total / static_cast<double>(splits.folds.size());
    if (!std::isfinite(mean)) throw Error("metric is not finite");
    result.objectives = {mean, -static_cast<double>(pipeline.size())};
    result.predictions = std::move(oof);
    result.status = EvalStatus::ok;
  } catch (const Cancelled&) {
    result.status = EvalStatus::timeout;
    result.error_msg = Clock::now() >= deadline ? "evaluation exceeded timeout" : "evaluation cancelled";
  } catch (const std::exception& e) {
    result.status = EvalStatus::error;
    result.error_msg = e.what();
  } catch (...) {
    result.status = EvalStatus::error;
    result.error_msg = "unknown failure";
  }
  result.duration_s = std::chrono::duration<double>(Clock::now() - started).count();
  return result;
}

EvaluationResult evaluate(const Pipeline& pipeline, const Dataset& ds, double fidelity, const EvalConfig& cfg,
                          const CancelToken& cancel) {
  CVSplits splits;
  try {
    splits = make_splits(ds.labels, cfg.folds, cfg.seed);
  } catch (const std::exception& e) {
    EvaluationResult result;
    result.pipeline = pipeline;
    result.canonical = canonical_encode(pipeline);
    result.fidelity = fidelity;
    result.start_time = WallClock::now();
    result.error_msg = e.what();
    return result;
  }
  return evaluate(pipeline, ds, splits, fidelity, cfg, cancel);
}

}  // namespace pipesearch
