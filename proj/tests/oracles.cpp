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

#include "oracles.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>

#include "pipesearch/learners.hpp"
#include "pipesearch/pareto.hpp"
#include "pipesearch/postprocess.hpp"
#include "pipesearch/rng.hpp"
#include "pipesearch/errors.hpp"
#include "pipesearch/strategies.hpp"
#include "support.hpp"

namespace oracles {

using namespace pipesearch;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return false;
    strict = strict || a[i] > b[i];
  }
  return strict;
}

std::vector<std::vector<std::size_t>> fronts(const std::vector<std::vector<double>>& points) {
  std::vector<bool> gone(points.size(), false);
  std::size_t left = points.size();
  std::vector<std::vector<std::size_t>> out;
  while (left > 0) {
    std::vector<std::size_t> front;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (gone[i]) continue;
      bool dominated = false;
      for (std::size_t j = 0; j < points.size() && !dominated; ++j)
        dominated = !gone[j] && dominates(points[j], points[i]);
      if (!dominated) front.push_back(i);
    }
    for (auto i : front) gone[i] = true;
    left -= front.size();
    out.push_back(front);
  }
  return out;
}

std::vector<double> crowding(const std::vector<std::vector<double>>& front) {
  const std::size_t n = front.size();
  std::vector<double> out(n, 0.0);
  if (n <= 2) return std::vector<double>(n, kInf);
  for (std::size_t k = 0; k < front[0].size(); ++k) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return front[a][k] < front[b][k]; });
    const double range = front[order.back()][k] - front[order.front()][k];
    out[order.front()] = out[order.back()] = kInf;
    if (range == 0.0) continue;
    for (std::size_t i = 1; i + 1 < n; ++i) out[order[i]] += (front[order[i + 1]][k] - front[order[i - 1]][k]) / range;
  }
  return out;
}

Check nsga2_core(std::uint64_t seed, std::size_t instances) {
  Check check;
  Rng rng(seed);
  for (std::size_t trial = 0; trial < instances && check.ok; ++trial) {
    const std::size_t n = rng.index(51);
    std::vector<std::vector<double>> pts(n, std::vector<double>(2));
    for (auto& p : pts)
      for (auto& v : p) v = trial % 2 ? static_cast<double>(rng.index(8)) : rng.uniform();
    if (non_dominated_sort(pts) != fronts(pts)) {
      check.ok = false;
      check.detail = "fronts differ on instance " + std::to_string(trial);
    }
    ++check.count;
  }
  const auto d = crowding_distance(std::vector<std::vector<double>>{{0.2, 0.8}, {0.5, 0.5}, {0.8, 0.2}});
  if (check.ok && !(d.size() == 3 && std::isinf(d[0]) && std::abs(d[1] - 2.0) < 1e-12 && std::isinf(d[2]))) {
    check.ok = false;
    check.detail = "crowding fixture is not [inf, 2, inf]";
  }
  return check;
}

Check asha_trace(std::uint64_t seed, std::size_t events) {
  // The simulator: rungs at 1/9, 1/3, 1 with eta = 3. Rung k may promote an
  // entry whose position in the score ranking (ties: earlier arrival first) is
  // below floor(size / 3), which is finite and not yet promoted from rung k.
  // The highest such rung wins; within it, the best-ranked entry.
  struct SimEntry {
    std::string id;
    double score;
  };
  const std::vector<double> fidelity = {1.0 / 9.0, 1.0 / 3.0, 1.0};
  std::vector<std::vector<SimEntry>> sim(3);
  std::vector<std::set<std::string>> sim_promoted(3);

  auto rank_of = [](const std::vector<SimEntry>& rung, std::size_t i) {
    std::size_t better = 0;
    for (std::size_t j = 0; j < rung.size(); ++j)
      if (rung[j].score > rung[i].score || (rung[j].score == rung[i].score && j < i)) ++better;
    return better;
  };
  struct Prediction {
    bool promote = false;
    std::string parent;
    std::size_t to = 0;
  };
  auto predict = [&]() {
    for (std::size_t k = 2; k-- > 0;) {
      const auto& rung = sim[k];
      const std::size_t slots = rung.size() / 3;
      std::size_t best = rung.size(), best_rank = rung.size();
      for (std::size_t i = 0; i < rung.size(); ++i) {
        if (!std::isfinite(rung[i].score) || sim_promoted[k].count(rung[i].id)) continue;
        const auto r = rank_of(rung, i);
        if (r < slots && r < best_rank) {
          best = i;
          best_rank = r;
        }
      }
      if (best < rung.size()) return Prediction{true, rung[best].id, k + 1};
    }
    return Prediction{};
  };

  // Synthetic scorer: a fixed function of the canonical string and fidelity.
  // About one in nine low-fidelity evaluations times out.
  auto evaluate_synthetic = [](const CandidateRequest& req, std::uint64_t seq) {
    EvaluationResult r;
    r.seq = seq;
    r.pipeline = req.pipeline;
    r.canonical = canonical_encode(req.pipeline);
    r.origin = req.origin;
    r.fidelity = req.fidelity;
    const auto h = fnv1a(r.canonical);
    if (req.fidelity < 1.0 && h % 9 == 0) {
      r.status = EvalStatus::timeout;
      return r;
    }
    r.status = EvalStatus::ok;
    const double base = static_cast<double>(h % 1000) / 1000.0;
    r.objectives = {std::round((0.5 * base + 0.5 * base * req.fidelity) * 100.0) / 100.0,
                    -static_cast<double>(req.pipeline.size())};
    return r;
  };

  Check check;
  Asha asha(space_from_json(nlohmann::json::parse(testsupport::read_text(testsupport::fixture("reference_space.json")))),
            AshaParams{});
  Rng strategy_rng(seed), schedule_rng(derive_seed(seed, 99));
  std::vector<EvaluationResult> in_flight;
  std::map<std::string, std::size_t> rung_of_id;
  std::uint64_t next_seq = 1;
  std::ostringstream why;

  for (std::size_t e = 0; e < events && check.ok; ++e) {
    const bool dispatch = in_flight.empty() || (in_flight.size() < 4 && schedule_rng.coin());
    if (dispatch) {
      const auto expected = predict();
      const auto req = asha.dispatch(strategy_rng);
      const std::uint64_t seq = next_seq++;
      if (expected.promote) {
        ++check.count;
        const bool match = req.origin.kind == OriginTag::Kind::promotion && req.origin.parent_ids.size() == 1 &&
                           req.origin.parent_ids[0] == expected.parent &&
                           std::abs(req.fidelity - fidelity[expected.to]) < 1e-12;
        if (!match) {
          why << "event " << e << ": expected promotion of " << expected.parent << " to rung " << expected.to
              << ", got origin " << req.origin.to_string() << " at fidelity " << req.fidelity;
          check.ok = false;
          break;
        }
        sim_promoted[expected.to - 1].insert(expected.parent);
      } else if (req.origin.kind == OriginTag::Kind::promotion || std::abs(req.fidelity - fidelity[0]) > 1e-12) {
        why << "event " << e << ": expected a fresh sample at rung 0, got " << req.origin.to_string() << " at fidelity "
            << req.fidelity;
        check.ok = false;
        break;
      }
      in_flight.push_back(evaluate_synthetic(req, seq));
    } else {
      const auto pick = schedule_rng.index(in_flight.size());
      const auto done = in_flight[pick];
      in_flight.erase(in_flight.begin() + static_cast<std::ptrdiff_t>(pick));
      asha.receive(done);
      std::size_t k = 0;
      while (std::abs(fidelity[k] - done.fidelity) > 1e-12) ++k;
      sim[k].push_back({done.eval_id(), done.ok() ? done.objectives[0] : -kInf});
    }
  }
  // final state agrees rung by rung
  for (std::size_t k = 0; k < 3 && check.ok; ++k) {
    const auto& rung = asha.rungs()[k];
    if (rung.entries.size() != sim[k].size() || rung.promoted != sim_promoted[k]) {
      why << "rung " << k << " state differs";
      check.ok = false;
    }
  }
  check.detail = why.str();
  return check;
}

GreedyTrace greedy_ensemble(const std::vector<Matrix>& library, const std::vector<int>& truth, std::size_t n,
                            Metric metric) {
  GreedyTrace trace;
  std::vector<std::size_t> counts(library.size(), 0);
  for (std::size_t step = 0; step < n; ++step) {
    std::size_t best = 0;
    double best_score = -kInf;
    for (std::size_t m = 0; m < library.size(); ++m) {
      // rebuild the candidate ensemble from scratch: running sum in pick order
      Matrix blend(truth.size(), library[0].cols());
      for (auto p : trace.picks)
        for (std::size_t i = 0; i < blend.data().size(); ++i) blend.data()[i] += library[p].data()[i];
      for (std::size_t i = 0; i < blend.data().size(); ++i)
        blend.data()[i] = (blend.data()[i] + library[m].data()[i]) / static_cast<double>(step + 1);
      const double s = score(blend, truth, metric);
      const bool wins = m == 0 || s > best_score || (s == best_score && counts[m] < counts[best]);
      if (wins) {
        best = m;
        best_score = s;
      }
    }
    ++counts[best];
    trace.picks.push_back(best);
    trace.step_scores.push_back(best_score);
  }
  return trace;
}

Check ensemble_fixtures(std::uint64_t seed, std::size_t fixtures) {
  Check check;
  Rng rng(seed);
  const Metric metrics[] = {Metric::accuracy, Metric::neg_log_loss, Metric::macro_f1};
  const auto t0 = WallClock::now();
  std::ostringstream why;
  for (std::size_t f = 0; f < fixtures && check.ok; ++f) {
    const std::size_t models = 1 + rng.index(10), rows = 4 + rng.index(20), classes = 2 + rng.index(2);
    const std::size_t n = 1 + rng.index(5);
    const Metric metric = metrics[f % 3];
    std::vector<int> truth(rows);
    for (auto& t : truth) t = static_cast<int>(rng.index(classes));
    // coarse probabilities make ties common, which exercises the tie rules
    std::vector<Matrix> preds;
    std::vector<EvaluationResult> library;
    for (std::size_t m = 0; m < models; ++m) {
      Matrix p(rows, classes);
      for (std::size_t r = 0; r < rows; ++r) {
        double total = 0.0;
        for (std::size_t c = 0; c < classes; ++c) total += p(r, c) = static_cast<double>(1 + rng.index(4));
        for (std::size_t c = 0; c < classes; ++c) p(r, c) /= total;
      }
      EvaluationResult res;
      res.seq = m + 1;
      res.pipeline = Pipeline{{Step{"majority", {}}}};
      res.canonical = "m" + std::to_string(m);
      res.status = EvalStatus::ok;
      res.objectives = {0.0, -1.0};
      res.start_time = t0 + std::chrono::milliseconds(m);
      res.predictions = std::make_shared<Matrix>(p);
      preds.push_back(p);
      library.push_back(res);
    }
    const auto expected = greedy_ensemble(preds, truth, n, metric);
    const auto got = ensemble_select(library, n, metric, truth);
    if (got.picks != expected.picks || got.step_scores != expected.step_scores) {
      why << "fixture " << f << ": pick sequence differs from the oracle";
      check.ok = false;
      break;
    }
    // the returned ensemble is the best-scoring prefix (earliest on ties)
    std::size_t kept = 1;
    for (std::size_t i = 1; i < n; ++i)
      if (expected.step_scores[i] > expected.step_scores[kept - 1]) kept = i + 1;
    double weight_sum = 0.0;
    bool weights_ok = got.kept == kept;
    for (const auto& m : got.members) {
      const auto c = static_cast<std::size_t>(
          std::count(expected.picks.begin(), expected.picks.begin() + static_cast<std::ptrdiff_t>(kept), m.library_index));
      weights_ok = weights_ok && m.count == c && m.weight > 0.0 &&
                   m.weight == static_cast<double>(c) / static_cast<double>(kept);
      weight_sum += m.weight;
    }
    weights_ok = weights_ok && std::abs(weight_sum - 1.0) <= 1e-12;
    if (!weights_ok) {
      why << "fixture " << f << ": members or weights differ from the best prefix";
      check.ok = false;
      break;
    }
    double best_single = -kInf;
    for (const auto& p : preds) best_single = std::max(best_single, score(p, truth, metric));
    if (got.final_score() < best_single) {
      why << "fixture " << f << ": ensemble " << got.final_score() << " below best single " << best_single;
      check.ok = false;
      break;
    }
    ++check.count;
  }
  check.detail = why.str();
  return check;
}

Check softmax_gradient(std::uint64_t seed, std::size_t instances, double tolerance, double* worst) {
  Check check;
  Rng rng(seed);
  double worst_rel = 0.0;
  for (std::size_t trial = 0; trial < instances; ++trial) {
    const std::size_t n = 3 + rng.index(10), d = 1 + rng.index(5), k = 2 + rng.index(3);
    Matrix x(n, d);
    for (auto& v : x.data()) v = rng.uniform() * 4 - 2;
    std::vector<int> y(n);
    for (auto& v : y) v = static_cast<int>(rng.index(k));
    Matrix w(k, d);
    for (auto& v : w.data()) v = rng.uniform() * 2 - 1;
    std::vector<double> b(k);
    for (auto& v : b) v = rng.uniform() - 0.5;
    const double l2 = trial % 2 ? 0.0 : rng.uniform();

    Matrix gw, scratch_w;
    std::vector<double> gb, scratch_b;
    softmax_objective(x, y, l2, w, b, gw, gb);
    std::vector<double> analytic(gw.data().begin(), gw.data().end());
    analytic.insert(analytic.end(), gb.begin(), gb.end());

    const double h = 1e-5;
    std::vector<double> numeric;
    auto probe = [&](double& slot) {
      const double keep = slot;
      slot = keep + h;
      const double up = softmax_objective(x, y, l2, w, b, scratch_w, scratch_b);
      slot = keep - h;
      const double down = softmax_objective(x, y, l2, w, b, scratch_w, scratch_b);
      slot = keep;
      numeric.push_back((up - down) / (2 * h));
    };
    for (auto& v : w.data()) probe(v);
    for (auto& v : b) probe(v);

    std::vector<double> diff(analytic.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = analytic[i] - numeric[i];
    const double rel = norm(diff) / std::max({norm(analytic), norm(numeric), 1e-300});
    worst_rel = std::max(worst_rel, rel);
    if (rel >= tolerance && check.ok) {
      check.ok = false;
      check.detail = "instance " + std::to_string(trial) + " relative error " + std::to_string(rel);
    }
    ++check.count;
  }
  if (worst) *worst = worst_rel;
  return check;
}

Check scaler_moments(std::uint64_t seed, std::size_t instances, double tolerance) {
  Check check;
  Rng rng(seed);
  for (std::size_t trial = 0; trial < instances; ++trial) {
    const std::size_t n = 5 + rng.index(200), d = 1 + rng.index(6);
    Matrix x(n, d);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < d; ++c)
        x(r, c) = (rng.uniform() - 0.3) * std::pow(10.0, static_cast<double>(c)) + 50.0 * static_cast<double>(c);
    auto scaler = component_factory("standard-scaler").make_transformer({});
    scaler->fit(x, std::vector<int>(n, 0), 1, {});
    const Matrix z = scaler->transform(x);
    for (std::size_t c = 0; c < d; ++c) {
      double mean = 0.0, var = 0.0;
      for (std::size_t r = 0; r < n; ++r) mean += z(r, c);
      mean /= static_cast<double>(n);
      for (std::size_t r = 0; r < n; ++r) var += (z(r, c) - mean) * (z(r, c) - mean);
      var /= static_cast<double>(n);
      if ((std::abs(mean) >= tolerance || std::abs(var - 1.0) >= tolerance) && check.ok) {
        check.ok = false;
        check.detail = "instance " + std::to_string(trial) + " column " + std::to_string(c) +
                       ": mean " + std::to_string(mean) + " variance " + std::to_string(var);
      }
    }
    ++check.count;
  }
  return check;
}

namespace {

const auto kLogBase = pipesearch::parse_timestamp("2026-03-01T12:00:00.000Z");

std::string random_text(pipesearch::Rng& rng, std::size_t max_len) {
  static const std::vector<std::string> pieces = {"a", "Z", "9", " ", "\"", "\\", "\n", "\t", "é", "→", "{", "}", ",",
                                                  ":", ">", "(", ")", "=", "\x01", "😀"};
  std::string s;
  const auto n = rng.index(max_len + 1);
  for (std::size_t i = 0; i < n; ++i) s += pieces[rng.index(pieces.size())];
  return s;
}

double random_real(pipesearch::Rng& rng) {
  switch (rng.index(4)) {
    case 0: return rng.uniform();
    case 1: return -static_cast<double>(rng.index(5));
    case 2: return std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng.index(200)) - 100);
    default: return std::bit_cast<double>(rng.next_u64() & 0x7fefffffffffffffULL) * (rng.coin() ? 1 : -1);
  }
}

void write_records(const std::filesystem::path& path, const std::vector<pipesearch::RunLogRecord>& records) {
  pipesearch::LogWriter w(path, {{"run_id", path.stem().string()}, {"seed", 7}});
  for (const auto& r : records) w.append(r);
}

}  // namespace

std::vector<pipesearch::RunLogRecord> synthetic_log(std::uint64_t seed, std::size_t n) {
  pipesearch::Rng rng(seed);
  std::vector<pipesearch::RunLogRecord> out;
  static const char* origins[] = {"random", "mutation(hyperparam)", "mutation(shrink)", "crossover", "promotion"};
  std::int64_t clock = 0;
  for (std::size_t i = 0; i < n; ++i) {
    pipesearch::RunLogRecord r;
    r.eval_id = std::to_string(i + 1);
    const auto kind = i < 3 ? 0 : rng.index(5);
    r.origin = origins[kind];
    if (kind == 1 || kind == 2 || kind == 4) r.parent_ids = {std::to_string(1 + rng.index(i))};
    if (kind == 3) r.parent_ids = {std::to_string(1 + rng.index(i)), std::to_string(1 + rng.index(i))};
    r.pipeline = "knn(k=" + std::to_string(1 + rng.index(15)) + ",weights=uniform)";
    r.fidelity = kind == 4 ? 1.0 : 1.0 / 3.0 * (1 + rng.index(3));
    const auto roll = rng.index(10);
    r.status = roll == 0 ? "error" : roll == 1 ? "timeout" : "ok";
    if (r.status == "ok") r.objectives = std::vector<double>{std::round(rng.uniform() * 1000) / 1000, -1.0};
    else r.error_msg = r.status == "error" ? "fit failed" : "evaluation exceeded timeout";
    clock += static_cast<std::int64_t>(rng.index(400));
    r.start_time = pipesearch::format_timestamp(kLogBase + std::chrono::milliseconds(clock));
    r.duration_s = static_cast<double>(rng.index(3000)) / 1000.0;
    r.cached = rng.index(20) == 0;
    if (r.cached) r.duration_s = 0.0;
    out.push_back(r);
  }
  return out;
}

std::vector<pipesearch::RunLogRecord> random_records(std::uint64_t seed, std::size_t n) {
  pipesearch::Rng rng(seed);
  std::vector<pipesearch::RunLogRecord> records;
  for (std::size_t i = 0; i < n; ++i) {
    pipesearch::RunLogRecord r;
    r.eval_id = std::to_string(i) + "#" + random_text(rng, 4);
    for (std::size_t p = rng.index(3); p > 0 && !records.empty(); --p)
      r.parent_ids.push_back(records[rng.index(records.size())].eval_id);
    r.origin = random_text(rng, 10);
    r.pipeline = random_text(rng, 40);
    r.fidelity = random_real(rng);
    const auto roll = rng.index(3);
    r.status = roll == 0 ? "ok" : roll == 1 ? "timeout" : "error";
    if (roll == 0) {
      std::vector<double> obj(rng.index(4));
      for (auto& v : obj) v = random_real(rng);
      r.objectives = obj;
    }
    if (rng.coin()) r.error_msg = random_text(rng, 30);
    r.start_time = pipesearch::format_timestamp(
        std::chrono::system_clock::time_point{} +
        std::chrono::milliseconds(static_cast<std::int64_t>(rng.index(4102444800000ULL))));
    r.duration_s = std::abs(random_real(rng));
    r.cached = rng.coin();
    records.push_back(r);
  }
  return records;
}

Check log_roundtrip(const std::filesystem::path& dir, std::uint64_t seed, std::size_t n) {
  Check c;
  const auto records = random_records(seed, n);
  const auto path = dir / "roundtrip.jsonl";
  write_records(path, records);
  const auto parsed = pipesearch::parse_log(path);
  if (parsed.header.value("format_version", -1) != pipesearch::kLogFormatVersion || !parsed.warnings.empty() ||
      parsed.records.size() != records.size())
    return {false, "header, warnings or record count differ", 0};
  std::istringstream lines(testsupport::read_text(path));
  std::string line;
  std::getline(lines, line);
  for (std::size_t i = 0; i < records.size(); ++i) {
    std::getline(lines, line);
    if (!(parsed.records[i] == records[i])) return {false, "record " + std::to_string(i) + " differs", c.count};
    if (pipesearch::canonical_line(parsed.records[i]) != line)
      return {false, "line " + std::to_string(i + 2) + " does not re-serialize byte for byte", c.count};
    ++c.count;
  }
  return c;
}

Check truncated_tail(const std::filesystem::path& dir, std::uint64_t seed) {
  Check c;
  const auto records = synthetic_log(seed, 8);
  const auto path = dir / "tail.jsonl";
  write_records(path, records);
  const auto text = testsupport::read_text(path);
  const auto last_start = text.rfind('\n', text.size() - 2) + 1;
  const auto last_end = text.size() - 1;  // position of the final newline
  for (auto cut = last_start; cut < last_end; ++cut) {
    const auto parsed = pipesearch::parse_log_text(text.substr(0, cut));
    const bool clean = cut == last_start;
    if (parsed.records.size() != records.size() - 1 || parsed.warnings.size() != (clean ? 0u : 1u))
      return {false, "cut at byte " + std::to_string(cut) + " parsed unexpectedly", c.count};
    for (std::size_t i = 0; i < parsed.records.size(); ++i)
      if (!(parsed.records[i] == records[i])) return {false, "record changed after cut", c.count};
    ++c.count;
  }
  // the same damage anywhere else is an error
  std::string damaged = text;
  damaged.erase(damaged.find('\n', damaged.find('\n') + 1) - 5, 5);
  try {
    pipesearch::parse_log_text(damaged);
    return {false, "interior damage was accepted", c.count};
  } catch (const pipesearch::LogError&) {
  }
  return c;
}

Check best_so_far_monotone(std::uint64_t first_seed, std::size_t logs) {
  Check c;
  for (std::uint64_t seed = first_seed; seed < first_seed + logs; ++seed) {
    const auto records = synthetic_log(seed, 1 + seed % 60);
    const auto s = pipesearch::best_so_far(records);
    std::size_t ok = 0;
    for (const auto& r : records) ok += r.status == "ok";
    if (s.size() != ok) return {false, "seed " + std::to_string(seed) + ": wrong point count", c.count};
    for (std::size_t i = 1; i < s.size(); ++i)
      if (s[i].value < s[i - 1].value || s[i].elapsed_s < s[i - 1].elapsed_s)
        return {false, "seed " + std::to_string(seed) + ": series decreases at point " + std::to_string(i), c.count};
    ++c.count;
  }
  return c;
}

}  // namespace oracles
