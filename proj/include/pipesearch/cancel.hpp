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

#include <atomic>
#include <chrono>
#include <memory>
#include <optional>

#include "pipesearch/errors.hpp"

namespace pipesearch {

using Clock = std::chrono::steady_clock;

class Cancelled : public Error {
 public:
  using Error::Error;
};

// Cooperative cancellation: a shared flag plus an optional deadline. Long
// loops call check() and unwind with Cancelled once either trips.
class CancelToken {
 public:
  CancelToken() = default;
  CancelToken(std::shared_ptr<std::atomic<bool>> flag, std::optional<Clock::time_point> deadline)
      : flag_(std::move(flag)), deadline_(deadline) {}

  static CancelToken until(Clock::time_point deadline) {
    return CancelToken(std::make_shared<std::atomic<bool>>(false), deadline);
  }

  bool cancelled() const {
    if (flag_ && flag_->load(std::memory_order_relaxed)) return true;
    return deadline_ && Clock::now() >= *deadline_;
  }

  void check() const {
    if (cancelled()) throw Cancelled("cancelled");
  }

  void cancel() const {
    if (flag_) flag_->store(true, std::memory_order_relaxed);
  }

  std::optional<Clock::time_point> deadline() const { return deadline_; }

  // Same flag, with the deadline tightened to `deadline` if that is sooner.
  CancelToken sooner(Clock::time_point deadline) const {
    auto d = deadline_ && *deadline_ < deadline ? *deadline_ : deadline;
    return CancelToken(flag_ ? flag_ : std::make_shared<std::atomic<bool>>(false), d);
  }

 private:
  std::shared_ptr<std::atomic<bool>> flag_;
  std::optional<Clock::time_point> deadline_;
};

}  // namespace pipesearch
