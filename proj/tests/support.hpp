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

#include <filesystem>
#include <string>
#include <vector>

#include "pipesearch/dataset.hpp"
#include "pipesearch/rng.hpp"

namespace testsupport {

std::filesystem::path fixture(const std::string& name);
std::filesystem::path data_file(const std::string& name);

// PIPESEARCH_REGEN_GOLDEN=1 rewrites golden files instead of comparing.
bool regen_golden();

// Compares `text` with fixtures/<name>; rewrites it in regen mode.
// Returns true when they agree (or after a rewrite).
bool matches_golden(const std::string& name, const std::string& text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// Fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

// Gaussian blobs: `classes` well-separated clusters in `features` dims.
pipesearch::Dataset blobs(std::size_t rows, std::size_t classes, std::size_t features, std::uint64_t seed,
                          double spread = 0.5);

// Same data as a CSV table with feature columns f0.. and label column "y".
pipesearch::Table blobs_table(std::size_t rows, std::size_t classes, std::size_t features, std::uint64_t seed,
                              double spread = 0.5);

// Registers test-only components (idempotent):
//   "always-fail"  estimator whose fit throws
//   "sleepy"       estimator that waits `ms` milliseconds in fit, honouring cancellation
//   "stubborn"     estimator that sleeps `ms` milliseconds ignoring cancellation
void register_test_components();

}  // namespace testsupport
