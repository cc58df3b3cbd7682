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

#include "pipesearch/search_space.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cctype>
#include <cstdlib>
#include <set>

#include "pipesearch/errors.hpp"

namespace pipesearch {

namespace {

bool is_reserved(char c) {
  return c == ',' || c == '(' || c == ')' || c == '=' || c == '>' || c == '"' ||
         std::isspace(static_cast<unsigned char>(c));
}

bool is_token(std::string_view s) {
  return !s.empty() && std::none_of(s.begin(), s.end(), is_reserved);
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// A hyperparameter whose domain holds at least two values.
bool is_variable(const HyperparamSpec& hp) {
  const auto* cat = std::get_if<CategoricalDomain>(&hp.domain);
  return cat == nullptr || cat->values.size() > 1;
}

std::vector<const HyperparamSpec*> variable_params(const ComponentSpec& spec) {
  std::vector<const HyperparamSpec*> out;
  for (const auto& hp : spec.hyperparams)
    if (is_variable(hp)) out.push_back(&hp);
  return out;
}

Step sample_step(const ComponentSpec& spec, Rng& rng) {
  Step step{spec.id, {}};
  for (const auto& hp : spec.hyperparams) step.params[hp.name] = sample_value(hp.domain, rng);
  return step;
}

std::set<std::string> used_ids(const Pipeline& p, std::size_t except) {
  std::set<std::string> ids;
  for (std::size_t i = 0; i < p.steps.size(); ++i)
    if (i != except) ids.insert(p.steps[i].component);
  return ids;
}

std::size_t transformer_count(const Pipeline& p) {
  return p.steps.empty() ? 0 : p.steps.size() - 1;
}

std::vector<const ComponentSpec*> replacement_options(const Pipeline& p, std::size_t i,
                                                      const SearchSpace& space) {
  const bool last = i + 1 == p.steps.size();
  const auto others = used_ids(p, i);
  std::vector<const ComponentSpec*> options;
  for (const auto* spec : space.with_role(last ? Role::estimator : Role::transformer))
    if (!others.contains(spec->id)) options.push_back(spec);
  return options;
}

bool can_replace(const Pipeline& p, std::size_t i, const SearchSpace& space) {
  const auto options = replacement_options(p, i, space);
  if (options.size() > 1) return true;
  const auto* own = space.find(p.steps[i].component);
  return own != nullptr && !variable_params(*own).empty() && !options.empty();
}

std::vector<const ComponentSpec*> unused_transformers(const Pipeline& p, const SearchSpace& space) {
  const auto used = used_ids(p, p.steps.size());
  std::vector<const ComponentSpec*> out;
  for (const auto* spec : space.with_role(Role::transformer))
    if (!used.contains(spec->id)) out.push_back(spec);
  return out;
}

bool has_duplicate_ids(const Pipeline& p) {
  std::set<std::string> seen;
  for (const auto& s : p.steps)
    if (!seen.insert(s.component).second) return true;
  return false;
}

}  // namespace

const HyperparamSpec* ComponentSpec::find(std::string_view name) const {
  for (const auto& hp : hyperparams)
    if (hp.name == name) return &hp;
  return nullptr;
}

const ComponentSpec* SearchSpace::find(std::string_view id) const {
  for (const auto& c : components)
    if (c.id == id) return &c;
  return nullptr;
}

std::vector<const ComponentSpec*> SearchSpace::with_role(Role role) const {
  std::vector<const ComponentSpec*> out;
  for (const auto& c : components)
    if (c.role == role) out.push_back(&c);
  return out;
}

std::string OriginTag::to_string() const {
  switch (kind) {
    case Kind::seed: return "seed";
    case Kind::random: return "random";
    case Kind::mutation: return "mutation(" + op + ")";
    case Kind::crossover: return "crossover";
    case Kind::promotion: return "promotion";
  }
  return "random";
}

OriginTag OriginTag::parse(std::string_view text, std::vector<std::string> parents) {
  OriginTag tag;
  tag.parent_ids = std::move(parents);
  if (text == "seed") {
    tag.kind = Kind::seed;
  } else if (text == "random") {
    tag.kind = Kind::random;
  } else if (text == "crossover") {
    tag.kind = Kind::crossover;
  } else if (text == "promotion") {
    tag.kind = Kind::promotion;
  } else if (text.starts_with("mutation(") && text.ends_with(")")) {
    tag.kind = Kind::mutation;
    tag.op = std::string(text.substr(9, text.size() - 10));
  } else {
    throw Error("unknown origin tag '" + std::string(text) + "'");
  }
  return tag;
}

bool value_in_domain(const HyperparamValue& value, const HyperparamDomain& domain) {
  return std::visit(
      Overloaded{
          [&](const CategoricalDomain& d) {
            const auto* s = std::get_if<std::string>(&value);
            return s != nullptr && std::find(d.values.begin(), d.values.end(), *s) != d.values.end();
          },
          [&](const IntegerDomain& d) {
            const auto* v = std::get_if<std::int64_t>(&value);
            return v != nullptr && *v >= d.lo && *v <= d.hi;
          },
          [&](const RealDomain& d) {
            const auto* v = std::get_if<double>(&value);
            return v != nullptr && std::isfinite(*v) && *v >= d.lo && *v <= d.hi;
          },
          [&](const BooleanDomain&) { return std::holds_alternative<bool>(value); },
      },
      domain);
}

std::vector<Violation> validate_space(const SearchSpace& space) {
  std::vector<Violation> out;
  if (space.max_pipeline_length < 1)
    out.push_back({"max_pipeline_length", "must be at least 1"});
  if (space.with_role(Role::estimator).empty())
    out.push_back({"components", "no estimator"});

  std::set<std::string> ids;
  for (std::size_t i = 0; i < space.components.size(); ++i) {
    const auto& c = space.components[i];
    const std::string path = "components[" + std::to_string(i) + "]";
    if (!is_token(c.id)) out.push_back({path + ".id", "invalid component id '" + c.id + "'"});
    if (!ids.insert(c.id).second) out.push_back({path + ".id", "duplicate component id '" + c.id + "'"});

    std::set<std::string> names;
    for (const auto& hp : c.hyperparams) {
      const std::string hpath = path + ".hyperparams." + hp.name;
      if (!is_token(hp.name)) out.push_back({hpath, "invalid hyperparameter name"});
      if (!names.insert(hp.name).second) out.push_back({hpath, "duplicate hyperparameter name"});
      std::visit(
          Overloaded{
              [&](const CategoricalDomain& d) {
                if (d.values.empty()) out.push_back({hpath, "categorical domain is empty"});
                std::set<std::string> atoms;
                for (const auto& v : d.values) {
                  if (!is_token(v)) out.push_back({hpath, "invalid categorical value '" + v + "'"});
                  if (!atoms.insert(v).second)
                    out.push_back({hpath, "duplicate categorical value '" + v + "'"});
                }
              },
              [&](const IntegerDomain& d) {
                if (!(d.lo < d.hi)) out.push_back({hpath, "integer domain requires low < high"});
                if (d.scale == Scale::log && d.lo <= 0)
                  out.push_back({hpath, "log scale requires low > 0"});
              },
              [&](const RealDomain& d) {
                if (!std::isfinite(d.lo) || !std::isfinite(d.hi) || !(d.lo < d.hi))
                  out.push_back({hpath, "real domain requires finite low < high"});
                if (d.scale == Scale::log && !(d.lo > 0))
                  out.push_back({hpath, "log scale requires low > 0"});
              },
              [](const BooleanDomain&) {},
          },
          hp.domain);
    }
  }
  return out;
}

std::vector<Violation> validate_pipeline(const Pipeline& p, const SearchSpace& space) {
  std::vector<Violation> out;
  if (p.steps.empty()) {
    out.push_back({"steps", "pipeline is empty"});
    return out;
  }
  if (static_cast<std::int64_t>(p.steps.size()) > space.max_pipeline_length)
    out.push_back({"steps", "pipeline longer than max_pipeline_length"});
  if (has_duplicate_ids(p)) out.push_back({"steps", "duplicate component in pipeline"});
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const auto& step = p.steps[i];
    const std::string path = "steps[" + std::to_string(i) + "]";
    const auto* spec = space.find(step.component);
    if (spec == nullptr) {
      out.push_back({path, "unknown component " + step.component});
      continue;
    }
    const Role expected = i + 1 == p.steps.size() ? Role::estimator : Role::transformer;
    if (spec->role != expected)
      out.push_back({path, expected == Role::estimator ? "last step must be an estimator"
                                                       : "only the last step may be an estimator"});
    for (const auto& [name, value] : step.params) {
      const auto* hp = spec->find(name);
      if (hp == nullptr)
        out.push_back({path + "." + name, "unknown hyperparameter"});
      else if (!value_in_domain(value, hp->domain))
        out.push_back({path + "." + name, "value outside domain"});
    }
  }
  return out;
}

HyperparamValue sample_value(const HyperparamDomain& domain, Rng& rng) {
  return std::visit(
      Overloaded{
          [&](const CategoricalDomain& d) -> HyperparamValue { return d.values[rng.index(d.values.size())]; },
          [&](const IntegerDomain& d) -> HyperparamValue {
            if (d.scale == Scale::linear) return rng.integer(d.lo, d.hi);
            const double lo = std::log10(static_cast<double>(d.lo));
            const double hi = std::log10(static_cast<double>(d.hi) + 1.0);
            const auto v = static_cast<std::int64_t>(std::floor(std::pow(10.0, lo + rng.uniform() * (hi - lo))));
            return std::clamp(v, d.lo, d.hi);
          },
          [&](const RealDomain& d) -> HyperparamValue {
            const double u = rng.uniform();
            if (d.scale == Scale::linear) return std::clamp(d.lo + u * (d.hi - d.lo), d.lo, d.hi);
            const double lo = std::log10(d.lo);
            const double hi = std::log10(d.hi);
            return std::clamp(std::pow(10.0, lo + u * (hi - lo)), d.lo, d.hi);
          },
          [&](const BooleanDomain&) -> HyperparamValue { return rng.coin(); },
      },
      domain);
}

Pipeline sample_pipeline(const SearchSpace& space, Rng& rng) {
  if (!validate_space(space).empty()) throw SearchSpaceError("invalid search space");
  const auto transformers = space.with_role(Role::transformer);
  const auto estimators = space.with_role(Role::estimator);
  const auto max_len = std::min<std::int64_t>(space.max_pipeline_length,
                                              static_cast<std::int64_t>(transformers.size()) + 1);
  const auto length = static_cast<std::size_t>(rng.integer(1, max_len));

  Pipeline p;
  std::vector<std::size_t> pool(transformers.size());
  for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
  for (std::size_t t = 0; t + 1 < length; ++t) {
    std::swap(pool[t], pool[t + rng.index(pool.size() - t)]);
    p.steps.push_back(sample_step(*transformers[pool[t]], rng));
  }
  p.steps.push_back(sample_step(*estimators[rng.index(estimators.size())], rng));
  return p;
}

Offspring mutate(const Pipeline& pipeline, const std::string& parent_id, const SearchSpace& space,
                 Rng& rng) {
  std::vector<std::size_t> tunable;
  std::vector<std::size_t> replaceable;
  for (std::size_t i = 0; i < pipeline.steps.size(); ++i) {
    const auto* spec = space.find(pipeline.steps[i].component);
    if (spec == nullptr) throw SearchSpaceError("unknown component " + pipeline.steps[i].component);
    if (!variable_params(*spec).empty()) tunable.push_back(i);
    if (can_replace(pipeline, i, space)) replaceable.push_back(i);
  }
  const auto free_transformers = unused_transformers(pipeline, space);
  const bool can_insert = static_cast<std::int64_t>(pipeline.size()) < space.max_pipeline_length &&
                          !free_transformers.empty();
  const bool can_shrink = transformer_count(pipeline) > 0;

  std::vector<std::string> ops;
  if (!tunable.empty()) ops.emplace_back("hyperparam");
  if (!replaceable.empty()) ops.emplace_back("replace-step");
  if (can_insert) ops.emplace_back("insert-transformer");
  if (can_shrink) ops.emplace_back("shrink");
  if (ops.empty()) throw SearchSpaceError("no applicable mutation");

  const std::string op = ops[rng.index(ops.size())];
  Pipeline child = pipeline;
  if (op == "hyperparam") {
    auto& step = child.steps[tunable[rng.index(tunable.size())]];
    const auto params = variable_params(*space.find(step.component));
    const auto& hp = *params[rng.index(params.size())];
    const auto current = step.params.find(hp.name);
    HyperparamValue next = sample_value(hp.domain, rng);
    if (current != step.params.end()) {
      if (const auto* cat = std::get_if<CategoricalDomain>(&hp.domain)) {
        std::vector<std::string> others;
        for (const auto& v : cat->values)
          if (HyperparamValue(v) != current->second) others.push_back(v);
        if (!others.empty()) next = others[rng.index(others.size())];
      } else if (std::holds_alternative<BooleanDomain>(hp.domain)) {
        const auto* b = std::get_if<bool>(&current->second);
        next = b == nullptr ? true : !*b;
      } else {
        while (next == current->second) next = sample_value(hp.domain, rng);
      }
    }
    step.params[hp.name] = std::move(next);
  } else if (op == "replace-step") {
    const auto i = replaceable[rng.index(replaceable.size())];
    const auto options = replacement_options(pipeline, i, space);
    do {
      child.steps[i] = sample_step(*options[rng.index(options.size())], rng);
    } while (child.steps[i] == pipeline.steps[i]);
  } else if (op == "insert-transformer") {
    const auto pos = rng.index(transformer_count(pipeline) + 1);
    const auto* spec = free_transformers[rng.index(free_transformers.size())];
    child.steps.insert(child.steps.begin() + static_cast<std::ptrdiff_t>(pos), sample_step(*spec, rng));
  } else {
    const auto pos = rng.index(transformer_count(pipeline));
    child.steps.erase(child.steps.begin() + static_cast<std::ptrdiff_t>(pos));
  }
  return {std::move(child), OriginTag{OriginTag::Kind::mutation, op, {parent_id}}};
}

Offspring crossover(const Pipeline& a, const std::string& a_id, const Pipeline& b,
                    const std::string& b_id, const SearchSpace& space, Rng& rng) {
  const OriginTag tag{OriginTag::Kind::crossover, "", {a_id, b_id}};
  std::vector<Pipeline> children;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      Pipeline child;
      child.steps.assign(a.steps.begin(), a.steps.begin() + static_cast<std::ptrdiff_t>(i));
      child.steps.insert(child.steps.end(), b.steps.begin() + static_cast<std::ptrdiff_t>(j), b.steps.end());
      if (static_cast<std::int64_t>(child.size()) > space.max_pipeline_length) continue;
      if (has_duplicate_ids(child) || child == a || child == b) continue;
      children.push_back(std::move(child));
    }
  }
  if (!children.empty()) return {std::move(children[rng.index(children.size())]), tag};

  struct Exchange {
    std::size_t step;
    std::string name;
    HyperparamValue value;
  };
  std::vector<Exchange> exchanges;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (const auto& other : b.steps) {
      if (other.component != a.steps[i].component) continue;
      for (const auto& [name, value] : other.params) {
        const auto it = a.steps[i].params.find(name);
        if (it == a.steps[i].params.end() || it->second != value) exchanges.push_back({i, name, value});
      }
    }
  }
  if (exchanges.empty()) throw SearchSpaceError("degenerate crossover");
  const auto& pick = exchanges[rng.index(exchanges.size())];
  Pipeline child = a;
  child.steps[pick.step].params[pick.name] = pick.value;
  return {std::move(child), tag};
}

std::string format_value(const HyperparamValue& value) {
  return std::visit(Overloaded{
                        [](bool v) -> std::string { return v ? "true" : "false"; },
                        [](std::int64_t v) { return std::to_string(v); },
                        [](double v) {
                          char buf[32];
                          std::snprintf(buf, sizeof buf, "%.17g", v);
                          return std::string(buf);
                        },
                        [](const std::string& v) { return v; },
                    },
                    value);
}

std::string canonical_encode(const Pipeline& pipeline) {
  std::string out;
  for (std::size_t i = 0; i < pipeline.steps.size(); ++i) {
    if (i > 0) out += '>';
    const auto& step = pipeline.steps[i];
    out += step.component;
    out += '(';
    bool first = true;
    for (const auto& [name, value] : step.params) {
      if (!first) out += ',';
      first = false;
      out += name;
      out += '=';
      out += format_value(value);
    }
    out += ')';
  }
  return out;
}

namespace {

class Decoder {
 public:
  Decoder(std::string_view text, const SearchSpace& space) : text_(text), space_(space) {}

  Pipeline run() {
    Pipeline p;
    p.steps.push_back(step());
    while (pos_ < text_.size()) {
      expect('>');
      p.steps.push_back(step());
    }
    const auto violations = validate_pipeline(p, space_);
    if (!violations.empty())
      throw SearchSpaceError(violations.front().path + ": " + violations.front().message);
    return p;
  }

 private:
  std::string_view token() {
    const auto start = pos_;
    while (pos_ < text_.size() && !is_reserved(text_[pos_])) ++pos_;
    if (pos_ == start) throw ParseError("expected a name", start);
    return text_.substr(start, pos_ - start);
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c)
      throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  Step step() {
    const auto id = token();
    const auto* spec = space_.find(id);
    if (spec == nullptr) throw SearchSpaceError("unknown component " + std::string(id));
    Step s{std::string(id), {}};
    expect('(');
    if (pos_ < text_.size() && text_[pos_] == ')') {
      ++pos_;
      return s;
    }
    while (true) {
      const auto name_pos = pos_;
      const auto name = token();
      expect('=');
      const auto value_pos = pos_;
      const auto raw = token();
      const auto* hp = spec->find(name);
      if (hp == nullptr)
        throw ParseError("unknown hyperparameter '" + std::string(name) + "' of " + s.component, name_pos);
      if (s.params.contains(std::string(name)))
        throw ParseError("repeated hyperparameter '" + std::string(name) + "'", name_pos);
      s.params[std::string(name)] = value(raw, hp->domain, value_pos);
      if (pos_ < text_.size() && text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      expect(')');
      return s;
    }
  }

  static HyperparamValue value(std::string_view raw, const HyperparamDomain& domain, std::size_t pos) {
    return std::visit(
        Overloaded{
            [&](const CategoricalDomain&) -> HyperparamValue { return std::string(raw); },
            [&](const IntegerDomain&) -> HyperparamValue {
              std::int64_t v = 0;
              const auto [end, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), v);
              if (ec != std::errc() || end != raw.data() + raw.size())
                throw ParseError("malformed integer '" + std::string(raw) + "'", pos);
              return v;
            },
            [&](const RealDomain&) -> HyperparamValue {
              const std::string copy(raw);
              char* end = nullptr;
              const double v = std::strtod(copy.c_str(), &end);
              if (end != copy.c_str() + copy.size())
                throw ParseError("malformed real '" + copy + "'", pos);
              return v;
            },
            [&](const BooleanDomain&) -> HyperparamValue {
              if (raw == "true") return true;
              if (raw == "false") return false;
              throw ParseError("malformed boolean '" + std::string(raw) + "'", pos);
            },
        },
        domain);
  }

  std::string_view text_;
  const SearchSpace& space_;
  std::size_t pos_ = 0;
};

const char* scale_name(Scale s) { return s == Scale::log ? "log" : "linear"; }

Scale parse_scale(const nlohmann::json& j, const std::string& path) {
  const auto s = j.value("scale", std::string("linear"));
  if (s == "linear") return Scale::linear;
  if (s == "log") return Scale::log;
  throw SearchSpaceError(path + ".scale: expected 'linear' or 'log'");
}

}  // namespace

Pipeline canonical_decode(std::string_view text, const SearchSpace& space) {
  return Decoder(text, space).run();
}

SearchSpace space_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SearchSpaceError("search_space: expected an object");
  SearchSpace space;
  if (!doc.contains("max_pipeline_length") || !doc["max_pipeline_length"].is_number_integer())
    throw SearchSpaceError("max_pipeline_length: expected an integer");
  space.max_pipeline_length = doc["max_pipeline_length"].get<std::int64_t>();
  if (!doc.contains("components") || !doc["components"].is_array())
    throw SearchSpaceError("components: expected an array");
  std::size_t index = 0;
  for (const auto& c : doc["components"]) {
    const std::string path = "components[" + std::to_string(index++) + "]";
    if (!c.is_object()) throw SearchSpaceError(path + ": expected an object");
    ComponentSpec spec;
    if (!c.contains("id") || !c["id"].is_string()) throw SearchSpaceError(path + ".id: expected a string");
    spec.id = c["id"].get<std::string>();
    const auto role = c.value("role", std::string());
    if (role == "transformer") {
      spec.role = Role::transformer;
    } else if (role == "estimator") {
      spec.role = Role::estimator;
    } else {
      throw SearchSpaceError(path + ".role: expected 'transformer' or 'estimator'");
    }
    if (c.contains("hyperparams")) {
      if (!c["hyperparams"].is_object()) throw SearchSpaceError(path + ".hyperparams: expected an object");
      for (const auto& [name, d] : c["hyperparams"].items()) {
        const std::string hpath = path + ".hyperparams." + name;
        const auto type = d.is_object() ? d.value("type", std::string()) : std::string();
        HyperparamSpec hp{name, BooleanDomain{}};
        try {
          if (type == "categorical") {
            hp.domain = CategoricalDomain{d.at("values").get<std::vector<std::string>>()};
          } else if (type == "integer") {
            hp.domain = IntegerDomain{d.at("low").get<std::int64_t>(), d.at("high").get<std::int64_t>(),
                                      parse_scale(d, hpath)};
          } else if (type == "real") {
            hp.domain = RealDomain{d.at("low").get<double>(), d.at("high").get<double>(), parse_scale(d, hpath)};
          } else if (type != "boolean") {
            throw SearchSpaceError(hpath + ".type: expected categorical, integer, real or boolean");
          }
        } catch (const nlohmann::json::exception& e) {
          throw SearchSpaceError(hpath + ": " + e.what());
        }
        spec.hyperparams.push_back(std::move(hp));
      }
    }
    space.components.push_back(std::move(spec));
  }
  return space;
}

nlohmann::json space_to_json(const SearchSpace& space) {
  nlohmann::json components = nlohmann::json::array();
  for (const auto& c : space.components) {
    nlohmann::json hps = nlohmann::json::object();
    for (const auto& hp : c.hyperparams) {
      hps[hp.name] = std::visit(
          Overloaded{
              [](const CategoricalDomain& d) { return nlohmann::json{{"type", "categorical"}, {"values", d.values}}; },
              [](const IntegerDomain& d) {
                return nlohmann::json{{"type", "integer"}, {"low", d.lo}, {"high", d.hi}, {"scale", scale_name(d.scale)}};
              },
              [](const RealDomain& d) {
                return nlohmann::json{{"type", "real"}, {"low", d.lo}, {"high", d.hi}, {"scale", scale_name(d.scale)}};
              },
              [](const BooleanDomain&) { return nlohmann::json{{"type", "boolean"}}; },
          },
          hp.domain);
    }
    components.push_back({{"id", c.id},
                          {"role", c.role == Role::estimator ? "estimator" : "transformer"},
                          {"hyperparams", hps}});
  }
  return {{"max_pipeline_length", space.max_pipeline_length}, {"components", components}};
}

SearchSpace default_search_space() {
  SearchSpace space;
  space.max_pipeline_length = 3;
  space.components = {
      {"standard-scaler", Role::transformer, {}},
      {"min-max-scaler", Role::transformer, {}},
      {"variance-threshold", Role::transformer, {{"threshold", RealDomain{0.0, 0.1, Scale::linear}}}},
      {"select-k-best", Role::transformer, {{"k", IntegerDomain{1, 20, Scale::linear}}}},
      {"knn", Role::estimator,
       {{"k", IntegerDomain{1, 25, Scale::linear}},
        {"weights", CategoricalDomain{{"uniform", "distance"}}}}},
      {"decision-tree", Role::estimator,
       {{"max_depth", IntegerDomain{1, 12, Scale::linear}},
        {"min_samples_split", IntegerDomain{2, 20, Scale::linear}}}},
      {"random-forest", Role::estimator,
       {{"n_estimators", IntegerDomain{5, 50, Scale::linear}},
        {"max_depth", IntegerDomain{2, 12, Scale::linear}},
        {"max_features", CategoricalDomain{{"sqrt", "all"}}}}},
      {"logistic-regression", Role::estimator,
       {{"l2", RealDomain{1e-4, 10.0, Scale::log}}, {"max_iter", IntegerDomain{50, 300, Scale::linear}}}},
      {"gaussian-nb", Role::estimator, {{"var_smoothing", RealDomain{1e-12, 1e-1, Scale::log}}}},
  };
  return space;
}

}  // namespace pipesearch
