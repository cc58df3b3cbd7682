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
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "pipesearch/cancel.hpp"
#include "pipesearch/dataset.hpp"
#include "pipesearch/metrics.hpp"
#include "pipesearch/search_space.hpp"

namespace pipesearch {

enum class EvalStatus { ok, timeout, error };

std::string_view status_name(EvalStatus status);
EvalStatus status_from_name(std::string_view name);

using WallClock = std::chrono::system_clock;

struct EvaluationResult {
  std::uint64_t seq = 0;  // eval_id, as a number; unique and increasing per run
  Pipeline pipeline;
  std::string canonical;
  OriginTag origin;
  double fidelity = 1.0;
  // {mean fold metric, -pipeline length}; empty unless status == ok.
  std::vector<double> objectives;
  EvalStatus status = EvalStatus::error;
  std::string error_msg;
  WallClock::time_point start_time{};
  double duration_s = 0.0;
  // Out-of-fold class probabilities in dataset row order (ok only).
  std::shared_ptr<const Matrix> predictions;
  bool cached = false;

  std::string eval_id() const { return std::to_string(seq); }
  bool ok() const { return status == EvalStatus::ok; }
};

struct EvalConfig {
  std::size_t folds = 5;
  Metric metric = Metric::accuracy;
  double timeout_s = 60.0;
  std::uint64_t seed = 0;
};

// Cross-validated evaluation of `pipeline` with each fold's training rows
// subsampled to `fidelity`. Never throws: failures land in `status`.
EvaluationResult evaluate(const Pipeline& pipeline, const Dataset& ds, const CVSplits& splits, double fidelity,
                          const EvalConfig& cfg, const CancelToken& cancel = {});
EvaluationResult evaluate(const Pipeline& pipeline, const Dataset& ds, double fidelity, const EvalConfig& cfg,
                          const CancelToken& cancel = {});

}  // namespace pipesearch
