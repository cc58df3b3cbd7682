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

#include "pipesearch/learners.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <shared_mutex>

#include "pipesearch/kernels.hpp"
#include "pipesearch/rng.hpp"

namespace pipesearch {

namespace {

using nlohmann::json;

std::int64_t param_int(const Params& p, const std::string& name, std::int64_t fallback) {
  const auto it = p.find(name);
  if (it == p.end()) return fallback;
  if (const auto* v = std::get_if<std::int64_t>(&it->second)) return *v;
  if (const auto* d = std::get_if<double>(&it->second)) return static_cast<std::int64_t>(*d);
  return fallback;
}

double param_real(const Params& p, const std::string& name, double fallback) {
  const auto it = p.find(name);
  if (it == p.end()) return fallback;
  if (const auto* v = std::get_if<double>(&it->second)) return *v;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
  return fallback;
}

std::string param_string(const Params& p, const std::string& name, const std::string& fallback) {
  const auto it = p.find(name);
  if (it == p.end()) return fallback;
  if (const auto* v = std::get_if<std::string>(&it->second)) return *v;
  return fallback;
}

std::vector<double> column_means(const Matrix& x) {
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) mean[c] += x(r, c);
  for (auto& m : mean) m /= static_cast<double>(std::max<std::size_t>(x.rows(), 1));
  return mean;
}

std::vector<double> column_variances(const Matrix& x, const std::vector<double>& mean) {
  std::vector<double> var(x.cols(), 0.0);
  for (std::size_t r = 0; r < x.rows(); ++r)
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double d = x(r, c) - mean[c];
      var[c] += d * d;
    }
  for (auto& v : var) v /= static_cast<double>(std::max<std::size_t>(x.rows(), 1));
  return var;
}

std::vector<double> class_frequencies(std::span<const int> y, std::size_t classes) {
  std::vector<double> freq(classes, 0.0);
  for (int label : y) freq[static_cast<std::size_t>(label)] += 1.0;
  for (auto& f : freq) f /= static_cast<double>(std::max<std::size_t>(y.size(), 1));
  return freq;
}

void softmax_inplace(std::span<double> row) {
  double hi = -std::numeric_limits<double>::infinity();
  for (double v : row) hi = std::max(hi, v);
  double total = 0.0;
  for (auto& v : row) {
    v = std::exp(v - hi);
    total += v;
  }
  for (auto& v : row) v /= total;
}

// Affine column rescaling: out = (x - offset) / scale.
class AffineScaler : public Transformer {
 public:
  explicit AffineScaler(bool standardize) : standardize_(standardize) {}

  void fit(const Matrix& x, std::span<const int>, std::size_t, const FitContext& ctx) override {
    ctx.cancel.check();
    offset_.assign(x.cols(), 0.0);
    scale_.assign(x.cols(), 1.0);
    if (standardize_) {
      const auto mean = column_means(x);
      const auto var = column_variances(x, mean);
      for (std::size_t c = 0; c < x.cols(); ++c)
        if (var[c] > 0.0) {
          offset_[c] = mean[c];
          scale_[c] = std::sqrt(var[c]);
        }
    } else {
      for (std::size_t c = 0; c < x.cols(); ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (std::size_t r = 0; r < x.rows(); ++r) {
          lo = std::min(lo, x(r, c));
          hi = std::max(hi, x(r, c));
        }
        if (hi > lo) {
          offset_[c] = lo;
          scale_[c] = hi - lo;
        }
      }
    }
  }

  Matrix transform(const Matrix& x) const override {
    Matrix out(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - offset_[c]) / scale_[c];
    return out;
  }

  json state() const override { return {{"offset", offset_}, {"scale", scale_}}; }
  void load(const json& s) override {
    offset_ = s.at("offset").get<std::vector<double>>();
    scale_ = s.at("scale").get<std::vector<double>>();
  }

 private:
  bool standardize_;
  std::vector<double> offset_;
  std::vector<double> scale_;
};

class ColumnSelector : public Transformer {
 public:
  Matrix transform(const Matrix& x) const override { return x.select_cols(keep_); }
  json state() const override { return {{"keep", keep_}}; }
  void load(const json& s) override { keep_ = s.at("keep").get<std::vector<std::size_t>>(); }

 protected:
  std::vector<std::size_t> keep_;
};

class VarianceThreshold : public ColumnSelector {
 public:
  explicit VarianceThreshold(double threshold) : threshold_(threshold) {}

  void fit(const Matrix& x, std::span<const int>, std::size_t, const FitContext& ctx) override {
    ctx.cancel.check();
    const auto var = column_variances(x, column_means(x));
    keep_.clear();
    for (std::size_t c = 0; c < x.cols(); ++c)
      if (!(var[c] < threshold_)) keep_.push_back(c);
    if (keep_.empty()) throw Error("variance-threshold removed every feature");
  }

 private:
  double threshold_;
};

class SelectKBest : public ColumnSelector {
 public:
  explicit SelectKBest(std::int64_t k) : k_(k) {}

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes, const FitContext& ctx) override {
    ctx.cancel.check();
    const auto n = x.rows();
    const auto d = x.cols();
    std::vector<double> counts(classes, 0.0);
    for (int label : y) counts[static_cast<std::size_t>(label)] += 1.0;
    const double groups = static_cast<double>(std::count_if(counts.begin(), counts.end(), [](double c) { return c > 0; }));

    std::vector<double> f_stat(d, 0.0);
    for (std::size_t c = 0; c < d; ++c) {
      double total = 0.0;
      std::vector<double> class_sum(classes, 0.0);
      for (std::size_t r = 0; r < n; ++r) {
        total += x(r, c);
        class_sum[static_cast<std::size_t>(y[r])] += x(r, c);
      }
      const double mean = total / static_cast<double>(n);
      double between = 0.0;
      for (std::size_t k = 0; k < classes; ++k)
        if (counts[k] > 0) {
          const double diff = class_sum[k] / counts[k] - mean;
          between += counts[k] * diff * diff;
        }
      double within = 0.0;
      for (std::size_t r = 0; r < n; ++r) {
        const auto k = static_cast<std::size_t>(y[r]);
        const double diff = x(r, c) - class_sum[k] / counts[k];
        within += diff * diff;
      }
      const double df_between = groups - 1.0;
      const double df_within = static_cast<double>(n) - groups;
      double f = 0.0;
      if (within > 0.0 && df_between > 0.0 && df_within > 0.0) {
        f = (between / df_between) / (within / df_within);
      } else if (between > 0.0) {
        f = std::numeric_limits<double>::infinity();
      }
      f_stat[c] = std::isnan(f) ? 0.0 : f;
    }
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f_stat[a] > f_stat[b]; });
    const auto keep = std::min<std::size_t>(static_cast<std::size_t>(std::max<std::int64_t>(k_, 1)), d);
    keep_.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
    std::sort(keep_.begin(), keep_.end());
  }

 private:
  std::int64_t k_;
};

class Majority : public Estimator {
 public:
  void fit(const Matrix&, std::span<const int> y, std::size_t classes, const FitContext&) override {
    prior_ = class_frequencies(y, classes);
  }
  Matrix predict_proba(const Matrix& x, const CancelToken&) const override {
    Matrix out(x.rows(), prior_.size());
    for (std::size_t r = 0; r < x.rows(); ++r) std::copy(prior_.begin(), prior_.end(), out.row(r).begin());
    return out;
  }
  json state() const override { return {{"prior", prior_}}; }
  void load(const json& s) override { prior_ = s.at("prior").get<std::vector<double>>(); }

 private:
  std::vector<double> prior_;
};

class KNearestNeighbors : public Estimator {
 public:
  KNearestNeighbors(std::int64_t k, bool distance_weighted) : k_(k), distance_weighted_(distance_weighted) {}

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes, const FitContext& ctx) override {
    ctx.cancel.check();
    x_ = x;
    y_.assign(y.begin(), y.end());
    classes_ = classes;
  }

  Matrix predict_proba(const Matrix& x, const CancelToken& cancel) const override {
    constexpr std::size_t chunk = 64;
    const auto n = x_.rows();
    const auto k = std::min<std::size_t>(static_cast<std::size_t>(std::max<std::int64_t>(k_, 1)), n);
    Matrix out(x.rows(), classes_);
    std::vector<std::size_t> idx(n);
    for (std::size_t start = 0; start < x.rows(); start += chunk) {
      cancel.check();
      const auto stop = std::min(start + chunk, x.rows());
      std::vector<std::size_t> rows(stop - start);
      std::iota(rows.begin(), rows.end(), start);
      const auto dist = kernels::parallel::squared_distances(x.select_rows(rows), x_);
      for (std::size_t q = 0; q < rows.size(); ++q) {
        const auto d = dist.row(q);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                          [&](std::size_t a, std::size_t b) { return d[a] != d[b] ? d[a] < d[b] : a < b; });
        auto target = out.row(rows[q]);
        const bool exact = distance_weighted_ && d[idx[0]] == 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          const auto i = idx[j];
          double w = 1.0;
          if (exact) {
            w = d[i] == 0.0 ? 1.0 : 0.0;
          } else if (distance_weighted_) {
            w = 1.0 / std::sqrt(d[i]);
          }
          target[static_cast<std::size_t>(y_[i])] += w;
        }
        double total = 0.0;
        for (double v : target) total += v;
        for (auto& v : target) v /= total;
      }
    }
    return out;
  }

  json state() const override {
    return {{"rows", x_.rows()}, {"cols", x_.cols()}, {"x", std::vector<double>(x_.data().begin(), x_.data().end())},
            {"y", y_}, {"classes", classes_}};
  }
  void load(const json& s) override {
    x_ = Matrix(s.at("rows").get<std::size_t>(), s.at("cols").get<std::size_t>());
    const auto values = s.at("x").get<std::vector<double>>();
    std::copy(values.begin(), values.end(), x_.data().begin());
    y_ = s.at("y").get<std::vector<int>>();
    classes_ = s.at("classes").get<std::size_t>();
  }

 private:
  std::int64_t k_;
  bool distance_weighted_;
  Matrix x_;
  std::vector<int> y_;
  std::size_t classes_ = 0;
};

// CART classification tree with Gini impurity.
class Tree {
 public:
  struct Options {
    std::int64_t max_depth = 8;
    std::int64_t min_samples_split = 2;
    std::size_t max_features = 0;  // 0: all features at every node
  };

  void fit(const Matrix& x, std::span<const int> y, std::span<const std::size_t> rows, std::size_t classes,
           const Options& options, Rng& rng, const CancelToken& cancel) {
    nodes_.clear();
    classes_ = classes;
    std::vector<std::size_t> work(rows.begin(), rows.end());
    build(x, y, work, 0, options, rng, cancel);
  }

  std::span<const double> leaf(std::span<const double> row) const {
    std::size_t i = 0;
    while (nodes_[i].feature >= 0)
      i = row[static_cast<std::size_t>(nodes_[i].feature)] <= nodes_[i].threshold ? nodes_[i].left : nodes_[i].right;
    return nodes_[i].probs;
  }

  std::size_t classes() const { return classes_; }

  json to_json() const {
    json nodes = json::array();
    for (const auto& n : nodes_) {
      if (n.feature < 0) {
        nodes.push_back({{"probs", n.probs}});
      } else {
        nodes.push_back({{"feature", n.feature}, {"threshold", n.threshold}, {"left", n.left}, {"right", n.right}});
      }
    }
    return {{"classes", classes_}, {"nodes", nodes}};
  }

  void from_json(const json& j) {
    classes_ = j.at("classes").get<std::size_t>();
    nodes_.clear();
    for (const auto& n : j.at("nodes")) {
      Node node;
      if (n.contains("probs")) {
        node.probs = n.at("probs").get<std::vector<double>>();
      } else {
        node.feature = n.at("feature").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<std::size_t>();
        node.right = n.at("right").get<std::size_t>();
      }
      nodes_.push_back(std::move(node));
    }
  }

 private:
  struct Node {
    int feature = -1;
    double threshold = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
    std::vector<double> probs;
  };

  static double gini(const std::vector<double>& counts, double total) {
    if (total <= 0.0) return 0.0;
    double sum = 0.0;
    for (double c : counts) sum += (c / total) * (c / total);
    return 1.0 - sum;
  }

  std::size_t build(const Matrix& x, std::span<const int> y, std::vector<std::size_t>& rows, std::int64_t depth,
                    const Options& options, Rng& rng, const CancelToken& cancel) {
    cancel.check();
    const auto index = nodes_.size();
    nodes_.emplace_back();
    std::vector<double> counts(classes_, 0.0);
    for (auto r : rows) counts[static_cast<std::size_t>(y[r])] += 1.0;
    const double n = static_cast<double>(rows.size());
    const double parent = gini(counts, n);

    auto make_leaf = [&] {
      nodes_[index].probs = counts;
      for (auto& p : nodes_[index].probs) p /= n;
      return index;
    };
    if (depth >= options.max_depth || static_cast<std::int64_t>(rows.size()) < options.min_samples_split ||
        parent <= 0.0)
      return make_leaf();

    std::vector<std::size_t> features(x.cols());
    std::iota(features.begin(), features.end(), std::size_t{0});
    if (options.max_features > 0 && options.max_features < features.size()) {
      for (std::size_t i = 0; i < options.max_features; ++i)
        std::swap(features[i], features[i + rng.index(features.size() - i)]);
      features.resize(options.max_features);
      std::sort(features.begin(), features.end());
    }

    double best = parent - 1e-12;
    int best_feature = -1;
    double best_threshold = 0.0;
    std::vector<std::pair<double, int>> sorted(rows.size());
    std::vector<double> left(classes_);
    for (auto f : features) {
      for (std::size_t i = 0; i < rows.size(); ++i) sorted[i] = {x(rows[i], f), y[rows[i]]};
      std::sort(sorted.begin(), sorted.end());
      std::fill(left.begin(), left.end(), 0.0);
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        left[static_cast<std::size_t>(sorted[i].second)] += 1.0;
        if (sorted[i].first == sorted[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = n - nl;
        double gl = 0.0, gr = 0.0;
        for (std::size_t c = 0; c < classes_; ++c) {
          gl += (left[c] / nl) * (left[c] / nl);
          const double rc = counts[c] - left[c];
          gr += (rc / nr) * (rc / nr);
        }
        const double impurity = (nl * (1.0 - gl) + nr * (1.0 - gr)) / n;
        if (impurity < best) {
          best = impurity;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
          if (best_threshold >= sorted[i + 1].first) best_threshold = sorted[i].first;
        }
      }
    }
    if (best_feature < 0) return make_leaf();

    std::vector<std::size_t> lrows, rrows;
    for (auto r : rows) (x(r, static_cast<std::size_t>(best_feature)) <= best_threshold ? lrows : rrows).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    nodes_[index].feature = best_feature;
    nodes_[index].threshold = best_threshold;
    const auto l = build(x, y, lrows, depth + 1, options, rng, cancel);
    const auto r = build(x, y, rrows, depth + 1, options, rng, cancel);
    nodes_[index].left = l;
    nodes_[index].right = r;
    return index;
  }

  std::vector<Node> nodes_;
  std::size_t classes_ = 0;
};

class DecisionTree : public Estimator {
 public:
  explicit DecisionTree(Tree::Options options) : options_(options) {}

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes, const FitContext& ctx) override {
    std::vector<std::size_t> rows(x.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    Rng rng(ctx.seed);
    tree_.fit(x, y, rows, classes, options_, rng, ctx.cancel);
  }

  Matrix predict_proba(const Matrix& x, const CancelToken& cancel) const override {
    cancel.check();
    Matrix out(x.rows(), tree_.classes());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto p = tree_.leaf(x.row(r));
      std::copy(p.begin(), p.end(), out.row(r).begin());
    }
    return out;
  }

  json state() const override { return tree_.to_json(); }
  void load(const json& s) override { tree_.from_json(s); }

 private:
  Tree::Options options_;
  Tree tree_;
};

class RandomForest : public Estimator {
 public:
  RandomForest(std::int64_t trees, Tree::Options options, bool sqrt_features)
      : n_trees_(static_cast<std::size_t>(std::max<std::int64_t>(trees, 1))), options_(options),
        sqrt_features_(sqrt_features) {}

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes, const FitContext& ctx) override {
    auto options = options_;
    options.max_features =
        sqrt_features_ ? std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(x.cols())))))
                       : 0;
    classes_ = classes;
    trees_.assign(n_trees_, Tree{});
    std::vector<std::exception_ptr> errors(n_trees_);
    const auto count = static_cast<std::ptrdiff_t>(n_trees_);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t t = 0; t < count; ++t) {
      const auto i = static_cast<std::size_t>(t);
      try {
        Rng rng(derive_seed(ctx.seed, i));
        std::vector<std::size_t> rows(x.rows());
        for (auto& r : rows) r = rng.index(x.rows());
        trees_[i].fit(x, y, rows, classes, options, rng, ctx.cancel);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  Matrix predict_proba(const Matrix& x, const CancelToken& cancel) const override {
    Matrix out(x.rows(), classes_);
    for (const auto& tree : trees_) {
      cancel.check();
      for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto p = tree.leaf(x.row(r));
        auto dst = out.row(r);
        for (std::size_t c = 0; c < classes_; ++c) dst[c] += p[c];
      }
    }
    for (auto& v : out.data()) v /= static_cast<double>(trees_.size());
    return out;
  }

  json state() const override {
    json trees = json::array();
    for (const auto& t : trees_) trees.push_back(t.to_json());
    return {{"classes", classes_}, {"trees", trees}};
  }
  void load(const json& s) override {
    classes_ = s.at("classes").get<std::size_t>();
    trees_.clear();
    for (const auto& t : s.at("trees")) {
      trees_.emplace_back();
      trees_.back().from_json(t);
    }
  }

 private:
  std::size_t n_trees_;
  Tree::Options options_;
  bool sqrt_features_;
  std::size_t classes_ = 0;
  std::vector<Tree> trees_;
};

// Multinomial logistic regression fit by full-batch gradient descent on
// internally standardized inputs.
class LogisticRegression : public Estimator {
 public:
  LogisticRegression(double l2, std::int64_t max_iter) : l2_(l2), max_iter_(max_iter) {}

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes, const FitContext& ctx) override {
    offset_ = column_means(x);
    const auto var = column_variances(x, offset_);
    scale_.assign(x.cols(), 1.0);
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (var[c] > 0.0) {
        scale_[c] = std::sqrt(var[c]);
      } else {
        offset_[c] = 0.0;
      }
    }
    const Matrix z = standardize(x);
    double mean_sq = 0.0;
    for (double v : z.data()) mean_sq += v * v;
    mean_sq /= static_cast<double>(std::max<std::size_t>(z.rows(), 1));
    const double rate = 1.0 / (0.5 * mean_sq + l2_ + 1e-12);

    weights_ = Matrix(classes, x.cols());
    bias_.assign(classes, 0.0);
    Matrix grad_w;
    std::vector<double> grad_b;
    for (std::int64_t it = 0; it < max_iter_; ++it) {
      ctx.cancel.check();
      const double loss = softmax_objective(z, y, l2_, weights_, bias_, grad_w, grad_b);
      if (!std::isfinite(loss)) throw Error("logistic-regression diverged");
      auto w = weights_.data();
      const auto g = grad_w.data();
      for (std::size_t i = 0; i < w.size(); ++i) w[i] -= rate * g[i];
      for (std::size_t c = 0; c < classes; ++c) bias_[c] -= rate * grad_b[c];
    }
  }

  Matrix predict_proba(const Matrix& x, const CancelToken& cancel) const override {
    cancel.check();
    const Matrix z = standardize(x);
    Matrix out(x.rows(), weights_.rows());
    for (std::size_t r = 0; r < z.rows(); ++r) {
      auto logits = out.row(r);
      for (std::size_t c = 0; c < weights_.rows(); ++c) {
        double s = bias_[c];
        for (std::size_t j = 0; j < z.cols(); ++j) s += weights_(c, j) * z(r, j);
        logits[c] = s;
      }
      softmax_inplace(logits);
    }
    return out;
  }

  json state() const override {
    return {{"offset", offset_},
            {"scale", scale_},
            {"classes", weights_.rows()},
            {"weights", std::vector<double>(weights_.data().begin(), weights_.data().end())},
            {"bias", bias_}};
  }
  void load(const json& s) override {
    offset_ = s.at("offset").get<std::vector<double>>();
    scale_ = s.at("scale").get<std::vector<double>>();
    weights_ = Matrix(s.at("classes").get<std::size_t>(), offset_.size());
    const auto w = s.at("weights").get<std::vector<double>>();
    std::copy(w.begin(), w.end(), weights_.data().begin());
    bias_ = s.at("bias").get<std::vector<double>>();
  }

 private:
  Matrix standardize(const Matrix& x) const {
    Matrix z(x.rows(), x.cols());
    for (std::size_t r = 0; r < x.rows(); ++r)
      for (std::size_t c = 0; c < x.cols(); ++c) z(r, c) = (x(r, c) - offset_[c]) / scale_[c];
    return z;
  }

  double l2_;
  std::int64_t max_iter_;
  std::vector<double> offset_;
  std::vector<double> scale_;
  Matrix weights_;
  std::vector<double> bias_;
};

class GaussianNaiveBayes : public Estimator {
 public:
  explicit GaussianNaiveBayes(double smoothing) : smoothing_(smoothing) {}

  void fit(const Matrix& x, std::span<const int> y, std::size_t classes, const FitContext& ctx) override {
    ctx.cancel.check();
    const auto d = x.cols();
    const auto all_var = column_variances(x, column_means(x));
    const double max_var = all_var.empty() ? 0.0 : *std::max_element(all_var.begin(), all_var.end());
    const double epsilon = smoothing_ * (max_var > 0.0 ? max_var : 1.0);

    prior_ = class_frequencies(y, classes);
    mean_ = Matrix(classes, d);
    var_ = Matrix(classes, d);
    std::vector<double> counts(classes, 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto c = static_cast<std::size_t>(y[r]);
      counts[c] += 1.0;
      for (std::size_t j = 0; j < d; ++j) mean_(c, j) += x(r, j);
    }
    for (std::size_t c = 0; c < classes; ++c)
      for (std::size_t j = 0; j < d; ++j) mean_(c, j) /= std::max(counts[c], 1.0);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      const auto c = static_cast<std::size_t>(y[r]);
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = x(r, j) - mean_(c, j);
        var_(c, j) += diff * diff;
      }
    }
    for (std::size_t c = 0; c < classes; ++c)
      for (std::size_t j = 0; j < d; ++j) var_(c, j) = var_(c, j) / std::max(counts[c], 1.0) + epsilon;
  }

  Matrix predict_proba(const Matrix& x, const CancelToken& cancel) const override {
    cancel.check();
    constexpr double two_pi = 6.283185307179586;
    const auto classes = prior_.size();
    Matrix out(x.rows(), classes);
    for (std::size_t r = 0; r < x.rows(); ++r) {
      auto row = out.row(r);
      for (std::size_t c = 0; c < classes; ++c) {
        if (prior_[c] <= 0.0) {
          row[c] = -std::numeric_limits<double>::infinity();
          continue;
        }
        double ll = std::log(prior_[c]);
        for (std::size_t j = 0; j < x.cols(); ++j) {
          const double diff = x(r, j) - mean_(c, j);
          ll -= 0.5 * (std::log(two_pi * var_(c, j)) + diff * diff / var_(c, j));
        }
        row[c] = ll;
      }
      softmax_inplace(row);
    }
    return out;
  }

  json state() const override {
    return {{"prior", prior_},
            {"features", mean_.cols()},
            {"mean", std::vector<double>(mean_.data().begin(), mean_.data().end())},
            {"var", std::vector<double>(var_.data().begin(), var_.data().end())}};
  }
  void load(const json& s) override {
    prior_ = s.at("prior").get<std::vector<double>>();
    const auto d = s.at("features").get<std::size_t>();
    mean_ = Matrix(prior_.size(), d);
    var_ = Matrix(prior_.size(), d);
    const auto m = s.at("mean").get<std::vector<double>>();
    const auto v = s.at("var").get<std::vector<double>>();
    std::copy(m.begin(), m.end(), mean_.data().begin());
    std::copy(v.begin(), v.end(), var_.data().begin());
  }

 private:
  double smoothing_;
  std::vector<double> prior_;
  Matrix mean_;
  Matrix var_;
};

Tree::Options tree_options(const Params& p, std::int64_t default_depth) {
  return {param_int(p, "max_depth", default_depth), param_int(p, "min_samples_split", 2), 0};
}

struct Registry {
  std::shared_mutex mutex;
  std::map<std::string, ComponentFactory, std::less<>> factories;

  Registry() {
    auto transformer = [](auto make) {
      return ComponentFactory{Role::transformer, make, nullptr};
    };
    auto estimator = [](auto make) {
      return ComponentFactory{Role::estimator, nullptr, make};
    };
    factories["standard-scaler"] = transformer([](const Params&) { return std::make_unique<AffineScaler>(true); });
    factories["min-max-scaler"] = transformer([](const Params&) { return std::make_unique<AffineScaler>(false); });
    factories["variance-threshold"] = transformer(
        [](const Params& p) { return std::make_unique<VarianceThreshold>(param_real(p, "threshold", 0.0)); });
    factories["select-k-best"] =
        transformer([](const Params& p) { return std::make_unique<SelectKBest>(param_int(p, "k", 10)); });
    factories["majority"] = estimator([](const Params&) { return std::make_unique<Majority>(); });
    factories["knn"] = estimator([](const Params& p) {
      return std::make_unique<KNearestNeighbors>(param_int(p, "k", 5), param_string(p, "weights", "uniform") == "distance");
    });
    factories["decision-tree"] =
        estimator([](const Params& p) { return std::make_unique<DecisionTree>(tree_options(p, 8)); });
    factories["random-forest"] = estimator([](const Params& p) {
      return std::make_unique<RandomForest>(std::min<std::int64_t>(param_int(p, "n_estimators", 20), 50),
                                            tree_options(p, 10), param_string(p, "max_features", "sqrt") == "sqrt");
    });
    factories["logistic-regression"] = estimator([](const Params& p) {
      return std::make_unique<LogisticRegression>(param_real(p, "l2", 1e-2), param_int(p, "max_iter", 100));
    });
    factories["gaussian-nb"] = estimator(
        [](const Params& p) { return std::make_unique<GaussianNaiveBayes>(param_real(p, "var_smoothing", 1e-9)); });
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

}  // namespace

void register_component(const std::string& id, ComponentFactory factory) {
  auto& r = registry();
  std::unique_lock lock(r.mutex);
  r.factories[id] = std::move(factory);
}

const ComponentFactory& component_factory(std::string_view id) {
  auto& r = registry();
  std::shared_lock lock(r.mutex);
  const auto it = r.factories.find(id);
  if (it == r.factories.end()) throw Error("no implementation for component " + std::string(id));
  return it->second;
}

bool has_component(std::string_view id) {
  auto& r = registry();
  std::shared_lock lock(r.mutex);
  return r.factories.find(id) != r.factories.end();
}

double softmax_objective(const Matrix& x, std::span<const int> y, double l2, const Matrix& weights,
                         std::span<const double> bias, Matrix& grad_weights, std::vector<double>& grad_bias) {
  const auto n = x.rows();
  const auto classes = weights.rows();
  const auto d = x.cols();
  grad_weights = Matrix(classes, d);
  grad_bias.assign(classes, 0.0);
  std::vector<double> p(classes);
  double loss = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < classes; ++c) {
      double s = bias[c];
      for (std::size_t j = 0; j < d; ++j) s += weights(c, j) * x(r, j);
      p[c] = s;
    }
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : p) hi = std::max(hi, v);
    double total = 0.0;
    for (double v : p) total += std::exp(v - hi);
    const auto label = static_cast<std::size_t>(y[r]);
    loss -= p[label] - hi - std::log(total);
    for (std::size_t c = 0; c < classes; ++c) {
      const double err = std::exp(p[c] - hi) / total - (c == label ? 1.0 : 0.0);
      grad_bias[c] += err;
      for (std::size_t j = 0; j < d; ++j) grad_weights(c, j) += err * x(r, j);
    }
  }
  const double inv_n = 1.0 / static_cast<double>(std::max<std::size_t>(n, 1));
  loss *= inv_n;
  for (auto& g : grad_bias) g *= inv_n;
  double norm = 0.0;
  for (std::size_t c = 0; c < classes; ++c)
    for (std::size_t j = 0; j < d; ++j) {
      grad_weights(c, j) = grad_weights(c, j) * inv_n + l2 * weights(c, j);
      norm += weights(c, j) * weights(c, j);
    }
  return loss + 0.5 * l2 * norm;
}

nlohmann::json value_to_json(const HyperparamValue& value) {
  return std::visit([](const auto& v) { return nlohmann::json(v); }, value);
}

HyperparamValue value_from_json(const nlohmann::json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw Error("unsupported hyperparameter value " + j.dump());
}

FittedPipeline FittedPipeline::fit(const Pipeline& pipeline, const Matrix& x, std::span<const int> y,
                                   std::size_t classes, const FitContext& ctx) {
  FittedPipeline fitted;
  fitted.pipeline_ = pipeline;
  fitted.classes_ = classes;
  Matrix current = x;
  for (std::size_t i = 0; i < pipeline.steps.size(); ++i) {
    const auto& step = pipeline.steps[i];
    FitContext step_ctx{derive_seed(ctx.seed, i), ctx.cancel};
    try {
      const auto& factory = component_factory(step.component);
      const bool last = i + 1 == pipeline.steps.size();
      if (last) {
        if (!factory.make_estimator) throw Error(step.component + " is not an estimator");
        auto est = factory.make_estimator(step.params);
        est->fit(current, y, classes, step_ctx);
        fitted.estimator_ = std::move(est);
      } else {
        if (!factory.make_transformer) throw Error(step.component + " is not a transformer");
        auto tr = factory.make_transformer(step.params);
        tr->fit(current, y, classes, step_ctx);
        current = tr->transform(current);
        fitted.transformers_.push_back(std::move(tr));
      }
    } catch (const Cancelled&) {
      throw;
    } catch (const std::exception& e) {
      throw FitError("step " + std::to_string(i) + " (" + step.component + ") failed: " + e.what(), i, step.component);
    }
  }
  return fitted;
}

Matrix FittedPipeline::predict_proba(const Matrix& x, const CancelToken& cancel) const {
  Matrix current = x;
  for (const auto& tr : transformers_) {
    cancel.check();
    current = tr->transform(current);
  }
  Matrix out = estimator_->predict_proba(current, cancel);
  if (out.rows() != x.rows() || out.cols() != classes_)
    throw Error("estimator returned a " + std::to_string(out.rows()) + "x" + std::to_string(out.cols()) +
                " probability matrix");
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    double total = 0.0;
    for (auto& v : row) {
      if (!std::isfinite(v) || v < -1e-12) throw Error("estimator produced an invalid probability");
      v = std::max(v, 0.0);
      total += v;
    }
    if (!(total > 0.0)) throw Error("estimator produced an all-zero probability row");
    for (auto& v : row) v /= total;
  }
  return out;
}

nlohmann::json FittedPipeline::to_json() const {
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t i = 0; i < pipeline_.steps.size(); ++i) {
    const auto& step = pipeline_.steps[i];
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [name, value] : step.params) params[name] = value_to_json(value);
    const bool last = i + 1 == pipeline_.steps.size();
    steps.push_back({{"component", step.component},
                     {"params", params},
                     {"state", last ? estimator_->state() : transformers_[i]->state()}});
  }
  return {{"classes", classes_}, {"steps", steps}};
}

FittedPipeline FittedPipeline::from_json(const nlohmann::json& j) {
  FittedPipeline fitted;
  fitted.classes_ = j.at("classes").get<std::size_t>();
  const auto& steps = j.at("steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    Step step{s.at("component").get<std::string>(), {}};
    for (const auto& [name, value] : s.at("params").items()) step.params[name] = value_from_json(value);
    const auto& factory = component_factory(step.component);
    if (i + 1 == steps.size()) {
      if (!factory.make_estimator) throw Error(step.component + " is not an estimator");
      auto est = factory.make_estimator(step.params);
      est->load(s.at("state"));
      fitted.estimator_ = std::move(est);
    } else {
      if (!factory.make_transformer) throw Error(step.component + " is not a transformer");
      auto tr = factory.make_transformer(step.params);
      tr->load(s.at("state"));
      fitted.transformers_.push_back(std::move(tr));
    }
    fitted.pipeline_.steps.push_back(std::move(step));
  }
  if (!fitted.estimator_) throw Error("model has no estimator");
  return fitted;
}

}  // namespace pipesearch
