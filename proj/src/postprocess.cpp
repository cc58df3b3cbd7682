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

#include "pipesearch/postprocess.hpp"

#include <algorithm>
#include <fstream>

#include "pipesearch/kernels.hpp"

namespace pipesearch {

std::vector<std::size_t> usable_library(std::span<const EvaluationResult> library) {
  double top = -1.0;
  for (const auto& r : library)
    if (r.ok() && !r.cached && r.predictions) top = std::max(top, r.fidelity);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < library.size(); ++i) {
    const auto& r = library[i];
    if (r.ok() && !r.cached && r.predictions && r.fidelity == top) out.push_back(i);
  }
  return out;
}

const EvaluationResult& select_best(std::span<const EvaluationResult> library) {
  const EvaluationResult* best = nullptr;
  double top = -1.0;
  for (const auto& r : library)
    if (r.ok()) top = std::max(top, r.fidelity);
  for (const auto& r : library) {
    if (!r.ok() || r.fidelity != top) continue;
    if (best == nullptr) {
      best = &r;
      continue;
    }
    const double a = r.objectives[0], b = best->objectives[0];
    if (a != b) {
      if (a > b) best = &r;
    } else if (r.pipeline.size() != best->pipeline.size()) {
      if (r.pipeline.size() < best->pipeline.size()) best = &r;
    } else if (r.start_time != best->start_time) {
      if (r.start_time < best->start_time) best = &r;
    } else if (r.seq < best->seq) {
      best = &r;
    }
  }
  if (best == nullptr) throw Error("search produced no usable pipeline");
  return *best;
}

Ensemble ensemble_select(std::span<const EvaluationResult> library, std::size_t target_size, Metric metric,
                         std::span<const int> truth, const std::atomic<bool>* stop) {
  if (target_size < 1) throw Error("target size must be >= 1");
  const auto usable = usable_library(library);
  if (usable.empty()) throw Error("ensemble selection: empty usable library");

  std::vector<const Matrix*> candidates;
  for (auto i : usable) {
    if (library[i].predictions->rows() != truth.size())
      throw Error("ensemble selection: predictions are not row-aligned with the labels");
    candidates.push_back(library[i].predictions.get());
  }

  Ensemble ens;
  ens.metric = metric;
  std::vector<std::size_t> counts(usable.size(), 0);
  Matrix sum(truth.size(), candidates.front()->cols());

  // candidate a beats b on (score, fewer prior picks, earlier start, lower seq)
  auto better = [&](std::size_t a, double sa, std::size_t b, double sb) {
    if (sa != sb) return sa > sb;
    if (counts[a] != counts[b]) return counts[a] < counts[b];
    const auto& ra = library[usable[a]];
    const auto& rb = library[usable[b]];
    if (ra.start_time != rb.start_time) return ra.start_time < rb.start_time;
    return ra.seq < rb.seq;
  };

  for (std::size_t step = 0; step < target_size; ++step) {
    if (step > 0 && stop != nullptr && stop->load()) break;
    const auto scores = kernels::parallel::blend_scores(sum, step, candidates, truth, metric);
    std::size_t pick = 0;
    for (std::size_t m = 1; m < scores.size(); ++m)
      if (better(m, scores[m], pick, scores[pick])) pick = m;
    ++counts[pick];
    auto s = sum.data();
    const auto c = candidates[pick]->data();
    for (std::size_t i = 0; i < s.size(); ++i) s[i] += c[i];
    ens.picks.push_back(usable[pick]);
    ens.step_scores.push_back(scores[pick]);
  }

  ens.kept = static_cast<std::size_t>(std::max_element(ens.step_scores.begin(), ens.step_scores.end()) -
                                      ens.step_scores.begin()) + 1;
  const std::span<const std::size_t> kept(ens.picks.data(), ens.kept);
  const auto total = static_cast<double>(ens.kept);
  for (auto idx : kept) {
    const auto it = std::find_if(ens.members.begin(), ens.members.end(),
                                 [&](const Ensemble::Member& m) { return m.library_index == idx; });
    if (it == ens.members.end()) ens.members.push_back({idx, library[idx].canonical, 0, 0.0});
  }
  for (auto& m : ens.members) {
    m.count = static_cast<std::size_t>(std::count(kept.begin(), kept.end(), m.library_index));
    m.weight = static_cast<double>(m.count) / total;
  }
  return ens;
}

Matrix ensemble_predict(std::span<const double> weights, std::span<const FittedPipeline* const> members,
                        const Matrix& rows) {
  if (members.empty()) throw Error("ensemble has no members");
  Matrix out;
  for (std::size_t m = 0; m < members.size(); ++m) {
    const auto p = members[m]->predict_proba(rows);
    if (m == 0) out = Matrix(p.rows(), p.cols());
    auto o = out.data();
    const auto src = p.data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] += weights[m] * src[i];
  }
  return out;
}

FittedPipeline fit_final(const Pipeline& pipeline, const Dataset& ds, std::uint64_t seed, const CancelToken& cancel) {
  return FittedPipeline::fit(pipeline, ds.features, ds.labels, ds.class_count(), FitContext{seed, cancel});
}

Matrix Model::predict_proba(const Matrix& features) const {
  std::vector<double> weights;
  std::vector<const FittedPipeline*> fitted;
  for (const auto& m : members) {
    weights.push_back(m.weight);
    fitted.push_back(&m.fitted);
  }
  if (features.rows() == 0) return Matrix(0, class_names.size());
  return ensemble_predict(weights, fitted, features);
}

Matrix Model::predict_proba(const Table& table) const {
  const auto missing = encoder.missing_columns(table.header);
  const auto extra = encoder.extra_columns(table.header);
  if (!missing.empty() || !extra.empty()) {
    std::string msg = "schema mismatch:";
    for (const auto& m : missing) msg += " missing column '" + m + "'";
    for (const auto& e : extra) msg += " extra column '" + e + "'";
    throw DatasetError(DatasetError::Code::schema_mismatch, msg);
  }
  return predict_proba(encoder.transform(table));
}

nlohmann::json Model::to_json() const {
  nlohmann::json ms = nlohmann::json::array();
  for (const auto& m : members)
    ms.push_back({{"weight", m.weight}, {"pipeline", canonical_encode(m.fitted.pipeline())}, {"fitted", m.fitted.to_json()}});
  return {{"format", "pipesearch-model"},
          {"format_version", kModelFormatVersion},
          {"kind", kind},
          {"classes", class_names},
          {"encoder", encoder.to_json()},
          {"members", ms}};
}

Model Model::from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "pipesearch-model") throw Error("not a pipesearch model file");
  const auto version = j.value("format_version", 0);
  if (version != kModelFormatVersion)
    throw Error("unsupported model format_version " + std::to_string(version));
  Model model;
  model.kind = j.at("kind").get<std::string>();
  model.class_names = j.at("classes").get<std::vector<std::string>>();
  model.encoder = FeatureEncoder::from_json(j.at("encoder"));
  for (const auto& m : j.at("members"))
    model.members.push_back({m.at("weight").get<double>(), FittedPipeline::from_json(m.at("fitted"))});
  if (model.members.empty()) throw Error("model has no members");
  return model;
}

void Model::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write model to " + path.string());
  out << to_json().dump() << '\n';
  if (!out.flush()) throw Error("cannot write model to " + path.string());
}

Model Model::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open model " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed model file " + path.string() + ": " + e.what());
  }
}

Model build_ensemble_model(const Ensemble& ensemble, std::span<const EvaluationResult> library, const Dataset& ds,
                           const FeatureEncoder& encoder, std::uint64_t seed, const CancelToken& cancel,
                           std::vector<std::string>& warnings, const std::atomic<bool>* stop) {
  Model model;
  model.kind = "ensemble";
  model.encoder = encoder;
  model.class_names = ds.class_names;
  double kept = 0.0;
  for (const auto& member : ensemble.members) {
    if (stop != nullptr && stop->load() && !model.members.empty()) {
      warnings.push_back("stopped: skipped refit of " + member.pipeline);
      continue;
    }
    try {
      model.members.push_back({member.weight, fit_final(library[member.library_index].pipeline, ds, seed, cancel)});
      kept += member.weight;
    } catch (const std::exception& e) {
      warnings.push_back("dropped ensemble member " + member.pipeline + ": " + e.what());
    }
  }
  if (model.members.empty()) throw Error("every ensemble member failed to refit");
  for (auto& m : model.members) m.weight /= kept;
  return model;
}

}  // namespace pipesearch
