// Copyright 2026 The patsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "patsim/ontology.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace patsim {
namespace {

using nlohmann::json;

absl::Status Invalid(std::string_view context, std::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat(std::string(context), ": ", std::string(what)));
}

absl::StatusOr<std::string> RequireString(const json& obj,
                                          std::string_view key,
                                          std::string_view context) {
  auto it = obj.find(key);
  if (it == obj.end()) return Invalid(context, absl::StrCat("missing '", std::string(key), "'"));
  if (!it->is_string()) {
    return Invalid(context, absl::StrCat("'", std::string(key), "' must be a string"));
  }
  return it->get<std::string>();
}

absl::StatusOr<std::vector<std::string>> OptionalStringList(
    const json& obj, std::string_view key, std::string_view context) {
  std::vector<std::string> out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) {
    return Invalid(context, absl::StrCat("'", std::string(key), "' must be an array"));
  }
  for (const auto& item : *it) {
    if (!item.is_string()) {
      return Invalid(context, absl::StrCat("'", std::string(key), "' must hold strings"));
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

absl::StatusOr<DynamicPattern> ParsePattern(const json& obj) {
  if (!obj.is_object()) return Invalid("patterns", "entries must be objects");
  auto name = RequireString(obj, "name", "pattern");
  if (!name.ok()) return name.status();
  const std::string context = absl::StrCat("pattern '", *name, "'");

  DynamicPattern p;
  p.name = *name;

  auto src = RequireString(obj, "entity_src", context);
  if (!src.ok()) return src.status();
  auto tgt = RequireString(obj, "entity_tgt", context);
  if (!tgt.ok()) return tgt.status();
  p.entity_src = ParseEntityType(*src);
  p.entity_tgt = ParseEntityType(*tgt);

  auto rel = RequireString(obj, "relation", context);
  if (!rel.ok()) return rel.status();
  auto relation = ParseRelationType(*rel);
  if (!relation) return Invalid(context, absl::StrCat("unknown relation '", *rel, "'"));
  p.relation = *relation;

  auto dom = RequireString(obj, "domain", context);
  if (!dom.ok()) return dom.status();
  auto domain = ParseDomain(*dom);
  if (!domain) return Invalid(context, absl::StrCat("unknown domain '", *dom, "'"));
  p.domain = *domain;

  auto outcomes = OptionalStringList(obj, "typical_outcomes", context);
  if (!outcomes.ok()) return outcomes.status();
  p.typical_outcomes = *std::move(outcomes);
  auto hints = OptionalStringList(obj, "composition_hints", context);
  if (!hints.ok()) return hints.status();
  p.composition_hints = *std::move(hints);

  if (auto it = obj.find("mechanism_class"); it != obj.end()) {
    if (!it->is_string()) return Invalid(context, "'mechanism_class' must be a string");
    p.mechanism_class = it->get<std::string>();
  }
  if (auto it = obj.find("inverse_pattern"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) return Invalid(context, "'inverse_pattern' must be a string");
    p.inverse_pattern = it->get<std::string>();
  }
  if (auto it = obj.find("published_inverse"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) return Invalid(context, "'published_inverse' must be a string");
    p.published_inverse = it->get<std::string>();
  }
  if (auto it = obj.find("provenance"); it != obj.end()) {
    if (!it->is_string()) return Invalid(context, "'provenance' must be a string");
    p.provenance = it->get<std::string>();
  }

  auto prior = obj.find("confidence_prior");
  if (prior == obj.end() || !prior->is_number()) {
    return Invalid(context, "'confidence_prior' must be a number");
  }
  p.confidence_prior = prior->get<double>();
  if (!(p.confidence_prior > 0.0 && p.confidence_prior <= 1.0)) {
    return Invalid(context, "confidence_prior must lie in (0, 1]");
  }
  return p;
}

absl::Status ParseVector(const json& value, std::string_view name,
                         PatternVector& out) {
  const std::string context = absl::StrCat("vector '", std::string(name), "'");
  if (!value.is_array() || value.size() != kDims) {
    return Invalid(context, "must be an array of 8 numbers");
  }
  for (std::size_t d = 0; d < kDims; ++d) {
    if (!value[d].is_number()) return Invalid(context, "components must be numbers");
    double x = value[d].get<double>();
    if (!std::isfinite(x) || x < -1.0 || x > 1.0) {
      return Invalid(context,
                     absl::StrCat("component ", d, " is outside [-1, 1]"));
    }
    out[d] = x;
  }
  return absl::OkStatus();
}

// Reads [a, b, ...] rows of string columns with an optional trailing
// provenance column.
absl::StatusOr<std::vector<std::vector<std::string>>> ParseRows(
    const json& doc, std::string_view section, std::size_t width) {
  std::vector<std::vector<std::string>> rows;
  auto it = doc.find(section);
  if (it == doc.end() || it->is_null()) return rows;
  if (!it->is_array()) return Invalid(section, "must be an array");
  for (const auto& row : *it) {
    if (!row.is_array() || (row.size() != width && row.size() != width + 1)) {
      return Invalid(section, absl::StrCat("rows must have ", width,
                                           " names and an optional provenance"));
    }
    std::vector<std::string> cells;
    for (const auto& cell : row) {
      if (!cell.is_string()) return Invalid(section, "row entries must be strings");
      cells.push_back(cell.get<std::string>());
    }
    if (cells.size() == width) cells.push_back("paper");
    rows.push_back(std::move(cells));
  }
  return rows;
}

std::string Lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace

const DynamicPattern* PatternRegistry::Find(std::string_view name) const {
  auto it = patterns.find(name);
  return it == patterns.end() ? nullptr : &it->second;
}

std::string ValidationReport::ToString() const {
  if (ok()) return absl::StrCat(check, ": PASS");
  return absl::StrCat(check, ": FAIL\n  ", absl::StrJoin(violations, "\n  "));
}

absl::StatusOr<PatternRegistry> ParseRegistry(const json& doc) {
  if (!doc.is_object()) return Invalid("registry", "document must be an object");
  PatternRegistry reg;

  if (auto it = doc.find("patterns"); it != doc.end() && !it->is_null()) {
    if (!it->is_array()) return Invalid("patterns", "must be an array");
    for (const auto& entry : *it) {
      auto p = ParsePattern(entry);
      if (!p.ok()) return p.status();
      if (reg.patterns.contains(p->name)) {
        return Invalid("patterns", absl::StrCat("duplicate name '", p->name, "'"));
      }
      auto [slot, inserted] = reg.triple_index.emplace(p->triple(), p->name);
      if (!inserted) {
        return Invalid("patterns",
                       absl::StrCat("'", p->name, "' repeats the triple of '",
                                    slot->second, "'"));
      }
      std::string key = p->name;
      reg.patterns.emplace(std::move(key), *std::move(p));
    }
  }

  // Vectors: one per registered pattern, nothing else.
  json vectors = doc.value("vectors", json::object());
  if (!vectors.is_object()) return Invalid("vectors", "must be an object");
  for (auto it = vectors.begin(); it != vectors.end(); ++it) {
    auto pat = reg.patterns.find(it.key());
    if (pat == reg.patterns.end()) {
      return Invalid("vectors", absl::StrCat("'", it.key(), "' is not a registered pattern"));
    }
    if (auto s = ParseVector(it.value(), it.key(), pat->second.vector); !s.ok()) return s;
  }
  for (const auto& [name, p] : reg.patterns) {
    if (!vectors.contains(name)) {
      return Invalid("vectors", absl::StrCat("missing vector for '", name, "'"));
    }
  }

  auto rules = ParseRows(doc, "composition_table", 3);
  if (!rules.ok()) return rules.status();
  for (const auto& row : *rules) {
    for (int i = 0; i < 2; ++i) {
      if (!reg.Contains(row[i])) {
        return Invalid("composition_table",
                       absl::StrCat("rule source '", row[i], "' is not registered"));
      }
    }
    PatternPair key{row[0], row[1]};
    if (reg.composition.contains(key)) {
      return Invalid("composition_table",
                     absl::StrCat("duplicate rule (", row[0], ", ", row[1], ")"));
    }
    // Targets are not checked here; that is the closure validator's job.
    reg.composition.emplace(key, row[2]);
    reg.composition_provenance.emplace(key, row[3]);
  }

  auto pairs = ParseRows(doc, "inverse_table", 2);
  if (!pairs.ok()) return pairs.status();
  for (const auto& row : *pairs) {
    for (int i = 0; i < 2; ++i) {
      if (!reg.Contains(row[i])) {
        return Invalid("inverse_table",
                       absl::StrCat("'", row[i], "' is not a registered pattern"));
      }
    }
    auto [slot, inserted] = reg.inverses.emplace(row[0], row[1]);
    if (!inserted && slot->second != row[1]) {
      return Invalid("inverse_table",
                     absl::StrCat("'", row[0], "' has two inverses"));
    }
    reg.inverse_provenance.emplace(PatternPair{row[0], row[1]}, row[2]);
  }

  // Inline inverse_pattern fields merge into the table; the table wins ties
  // only when they agree.
  for (auto& [name, p] : reg.patterns) {
    if (p.inverse_pattern) {
      if (!reg.Contains(*p.inverse_pattern)) {
        return Invalid(absl::StrCat("pattern '", name, "'"),
                       absl::StrCat("inverse_pattern '", *p.inverse_pattern,
                                    "' is not registered"));
      }
      auto [slot, inserted] = reg.inverses.emplace(name, *p.inverse_pattern);
      if (!inserted && slot->second != *p.inverse_pattern) {
        return Invalid(absl::StrCat("pattern '", name, "'"),
                       "inverse_pattern disagrees with inverse_table");
      }
    }
  }
  for (const auto& [name, inverse] : reg.inverses) {
    reg.patterns.find(name)->second.inverse_pattern = inverse;
  }

  json scenarios = doc.value("scenarios", json::object());
  json descriptions = doc.value("scenario_descriptions", json::object());
  if (!scenarios.is_object()) return Invalid("scenarios", "must be an object");
  for (auto it = scenarios.begin(); it != scenarios.end(); ++it) {
    NamedScenario sc;
    sc.name = it.key();
    const std::string context = absl::StrCat("scenario '", sc.name, "'");
    if (!it.value().is_array() || it.value().empty()) {
      return Invalid(context, "must be a non-empty array of pattern names");
    }
    for (const auto& item : it.value()) {
      if (!item.is_string()) return Invalid(context, "entries must be strings");
      std::string name = item.get<std::string>();
      if (!reg.Contains(name)) {
        return Invalid(context, absl::StrCat("'", name, "' is not registered"));
      }
      sc.initial_patterns.push_back(std::move(name));
    }
    if (descriptions.is_object() && descriptions.contains(sc.name) &&
        descriptions[sc.name].is_string()) {
      sc.description = descriptions[sc.name].get<std::string>();
    }
    reg.scenarios.emplace(sc.name, std::move(sc));
  }
  return reg;
}

absl::StatusOr<PatternRegistry> LoadRegistry(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr,
                         /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError("registry: malformed JSON document");
  }
  auto reg = ParseRegistry(doc);
  if (!reg.ok()) return reg.status();

  std::vector<std::string> failures;
  for (const ValidationReport& report :
       {ValidateInverses(*reg), ValidateCompositionClosure(*reg)}) {
    if (!report.ok()) failures.push_back(report.ToString());
  }
  if (!failures.empty()) {
    return absl::FailedPreconditionError(absl::StrJoin(failures, "\n"));
  }
  return reg;
}

absl::StatusOr<PatternRegistry> LoadRegistryFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open registry '", path, "'"));
  std::ostringstream buf;
  buf << in.rdbuf();
  return LoadRegistry(buf.str());
}

ValidationReport ValidateInverses(const PatternRegistry& reg) {
  ValidationReport report{"validate_inverses", {}};
  for (const auto& [a, b] : reg.inverses) {
    auto reverse = reg.inverses.find(b);
    if (reverse == reg.inverses.end() || reverse->second != a) {
      report.violations.push_back(absl::StrCat(
          "inverse (", a, " -> ", b, ") lacks reverse entry (", b, " -> ", a, ")"));
    }
  }
  return report;
}

ValidationReport ValidateCompositionClosure(const PatternRegistry& reg) {
  ValidationReport report{"validate_composition_closure", {}};
  for (const auto& [key, target] : reg.composition) {
    if (!reg.Contains(target)) {
      report.violations.push_back(absl::StrCat("rule (", key.first, ", ", key.second,
                                               ") -> ", target,
                                               ": target is not a registered pattern"));
    }
  }
  return report;
}

absl::StatusOr<std::optional<std::string>> Compose(const PatternRegistry& reg,
                                                   std::string_view a,
                                                   std::string_view b) {
  for (std::string_view name : {a, b}) {
    if (!reg.Contains(name)) {
      return absl::NotFoundError(absl::StrCat("unknown pattern '", std::string(name), "'"));
    }
  }
  auto it = reg.composition.find(PatternPair{std::string(a), std::string(b)});
  if (it == reg.composition.end()) return std::optional<std::string>();
  return std::optional<std::string>(it->second);
}

double LcsRatio(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  std::string x = Lower(a);
  std::string y = Lower(b);
  std::vector<std::size_t> prev(y.size() + 1, 0);
  std::vector<std::size_t> curr(y.size() + 1, 0);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    for (std::size_t j = 1; j <= y.size(); ++j) {
      curr[j] = x[i - 1] == y[j - 1] ? prev[j - 1] + 1
                                     : std::max(prev[j], curr[j - 1]);
    }
    std::swap(prev, curr);
  }
  return 2.0 * static_cast<double>(prev[y.size()]) /
         static_cast<double>(x.size() + y.size());
}

std::optional<PatternMatch> LookupPatternByStrings(const PatternRegistry& reg,
                                                   std::string_view src,
                                                   std::string_view rel,
                                                   std::string_view tgt) {
  EntityType s = ParseEntityType(src);
  EntityType t = ParseEntityType(tgt);
  auto r = ParseRelationType(rel);
  bool src_ok = s != EntityType::kUnknown || Lower(src) == "unknown";
  bool tgt_ok = t != EntityType::kUnknown || Lower(tgt) == "unknown";
  if (r && src_ok && tgt_ok) {
    auto it = reg.triple_index.find(Triple{s, *r, t});
    if (it != reg.triple_index.end()) return PatternMatch{reg.Find(it->second), 1.0};
  }

  std::optional<PatternMatch> best;
  // patterns iterates in name order, so strict > keeps the smallest name.
  for (const auto& [name, p] : reg.patterns) {
    double score = (LcsRatio(src, EntityTypeName(p.entity_src)) +
                    LcsRatio(rel, RelationTypeName(p.relation)) +
                    LcsRatio(tgt, EntityTypeName(p.entity_tgt))) /
                   3.0;
    if (score >= kFuzzyMatchThreshold && (!best || score > best->score)) {
      best = PatternMatch{&p, score};
    }
  }
  return best;
}

absl::StatusOr<double> CouplingAsymmetry(std::span<const WeightedPattern> active) {
  std::array<double, kNumDomains> mass{};
  double total = 0.0;
  for (const auto& wp : active) {
    if (wp.pattern == nullptr) return absl::InvalidArgumentError("null pattern");
    if (!(wp.weight >= 0.0) || !std::isfinite(wp.weight)) {
      return absl::InvalidArgumentError("weights must be finite and non-negative");
    }
    mass[static_cast<std::size_t>(wp.pattern->domain)] += wp.weight;
    total += wp.weight;
  }
  if (total <= 0.0) return absl::InvalidArgumentError("all weights are zero");
  double hhi = 0.0;
  for (double m : mass) hhi += (m / total) * (m / total);
  constexpr double kBaseline = 1.0 / static_cast<double>(kNumDomains);
  return std::clamp((hhi - kBaseline) / (1.0 - kBaseline), 0.0, 1.0);
}

}  // namespace patsim
