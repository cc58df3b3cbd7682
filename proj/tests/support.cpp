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

#include "support.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <unistd.h>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "pipesearch/learners.hpp"

namespace testsupport {

using namespace pipesearch;
namespace fs = std::filesystem;

fs::path fixture(const std::string& name) { return fs::path(PIPESEARCH_FIXTURES) / name; }
fs::path data_file(const std::string& name) { return fs::path(PIPESEARCH_DATA) / name; }

bool regen_golden() {
  const char* v = std::getenv("PIPESEARCH_REGEN_GOLDEN");
  return v != nullptr && std::string(v) == "1";
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
}

bool matches_golden(const std::string& name, const std::string& text) {
  const auto path = fixture(name);
  if (regen_golden()) {
    write_text(path, text);
    return true;
  }
  return fs::exists(path) && read_text(path) == text;
}

fs::path scratch_dir(const std::string& name) {
  static std::atomic<int> counter{0};
  const auto dir = fs::temp_directory_path() /
                   ("pipesearch-test-" + name + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Dataset blobs(std::size_t rows, std::size_t classes, std::size_t features, std::uint64_t seed, double spread) {
  const auto t = blobs_table(rows, classes, features, seed, spread);
  const auto enc = FeatureEncoder::fit(t, "y");
  return make_dataset(t, enc);
}

Table blobs_table(std::size_t rows, std::size_t classes, std::size_t features, std::uint64_t seed, double spread) {
  std::normal_distribution<double> noise(0.0, spread);
  std::mt19937_64 gen(seed);
  Table t;
  for (std::size_t f = 0; f < features; ++f) t.header.push_back("f" + std::to_string(f));
  t.header.push_back("y");
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = r % classes;
    std::vector<std::string> row;
    for (std::size_t f = 0; f < features; ++f) {
      const double angle = 6.283185307179586 * static_cast<double>(c) / static_cast<double>(classes);
      const double center = 3.0 * std::cos(angle + 1.3 * static_cast<double>(f));
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", center + noise(gen));
      row.push_back(buf);
    }
    row.push_back("c" + std::to_string(c));
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

class FailingEstimator : public Estimator {
 public:
  void fit(const Matrix&, std::span<const int>, std::size_t, const FitContext&) override {
    throw Error("always-fail refuses to fit");
  }
  Matrix predict_proba(const Matrix&, const CancelToken&) const override { return {}; }
  nlohmann::json state() const override { return nlohmann::json::object(); }
  void load(const nlohmann::json&) override {}
};

// Majority-class predictor that spends `ms` milliseconds in fit.
class SleepyEstimator : public Estimator {
 public:
  SleepyEstimator(std::int64_t ms, bool cooperative) : ms_(ms), cooperative_(cooperative) {}
  void fit(const Matrix&, std::span<const int> y, std::size_t classes, const FitContext& ctx) override {
    const auto end = std::chrono::steady_clock::now() + std::chrono::milliseconds(ms_);
    while (std::chrono::steady_clock::now() < end) {
      if (cooperative_) ctx.cancel.check();
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    prior_.assign(classes, 0.0);
    for (int v : y) prior_[static_cast<std::size_t>(v)] += 1.0;
    for (auto& p : prior_) p /= static_cast<double>(y.size());
  }
  Matrix predict_proba(const Matrix& x, const CancelToken&) const override {
    Matrix out(x.rows(), prior_.size());
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t c = 0; c < prior_.size(); ++c) out(r, c) = prior_[c];
    return out;
  }
  nlohmann::json state() const override { return {{"prior", prior_}}; }
  void load(const nlohmann::json& s) override { prior_ = s.at("prior").get<std::vector<double>>(); }

 private:
  std::int64_t ms_;
  bool cooperative_;
  std::vector<double> prior_;
};

std::int64_t ms_param(const Params& p) {
  const auto it = p.find("ms");
  return it == p.end() ? 0 : std::get<std::int64_t>(it->second);
}

}  // namespace

void register_test_components() {
  static std::once_flag once;
  std::call_once(once, [] {
    ComponentFactory fail;
    fail.role = Role::estimator;
    fail.make_estimator = [](const Params&) { return std::make_unique<FailingEstimator>(); };
    register_component("always-fail", fail);

    ComponentFactory sleepy;
    sleepy.role = Role::estimator;
    sleepy.make_estimator = [](const Params& p) { return std::make_unique<SleepyEstimator>(ms_param(p), true); };
    register_component("sleepy", sleepy);

    ComponentFactory stubborn;
    stubborn.role = Role::estimator;
    stubborn.make_estimator = [](const Params& p) { return std::make_unique<SleepyEstimator>(ms_param(p), false); };
    register_component("stubborn", stubborn);
  });
}

}  // namespace testsupport
