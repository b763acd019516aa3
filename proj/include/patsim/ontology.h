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

// Pattern registry: the named Dynamic Patterns, the partial composition
// operation over them, the inverse involution, and the startup validators.
//
// A registry is built once by LoadRegistry() and treated as immutable
// afterwards; concurrent readers need no synchronisation.

#ifndef PATSIM_ONTOLOGY_H_
#define PATSIM_ONTOLOGY_H_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "patsim/types.h"

namespace patsim {

struct DynamicPattern {
  std::string name;
  EntityType entity_src = EntityType::kUnknown;
  RelationType relation = RelationType::kSanction;
  EntityType entity_tgt = EntityType::kUnknown;
  SemanticDomain domain = SemanticDomain::kGeopolitics;
  std::vector<std::string> typical_outcomes;
  std::string mechanism_class;
  std::optional<std::string> inverse_pattern;
  // Opaque metadata; no computation reads it.
  std::vector<std::string> composition_hints;
  double confidence_prior = 1.0;
  PatternVector vector{};
  // "paper" for published entries, "completed" for editorial fill-ins.
  std::string provenance = "paper";
  // Published inverse label when it differs from the registered inverse.
  std::optional<std::string> published_inverse;

  Triple triple() const { return {entity_src, relation, entity_tgt}; }
};

struct NamedScenario {
  std::string name;
  std::vector<std::string> initial_patterns;
  std::string description;
};

using PatternPair = std::pair<std::string, std::string>;

struct PatternRegistry {
  std::map<std::string, DynamicPattern, std::less<>> patterns;
  std::map<Triple, std::string> triple_index;
  // Order-sensitive: (a, b) and (b, a) are distinct keys.
  std::map<PatternPair, std::string> composition;
  std::map<PatternPair, std::string> composition_provenance;
  std::map<std::string, std::string, std::less<>> inverses;
  std::map<PatternPair, std::string> inverse_provenance;
  std::map<std::string, NamedScenario, std::less<>> scenarios;

  const DynamicPattern* Find(std::string_view name) const;
  bool Contains(std::string_view name) const { return Find(name) != nullptr; }
};

struct ValidationReport {
  std::string check;
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  std::string ToString() const;
};

// Parses a registry document without running the algebraic validators.
// Structural problems (bad types, unknown relation names, out-of-range
// priors or vector components, rules whose sources are unregistered) are
// reported as InvalidArgument.
absl::StatusOr<PatternRegistry> ParseRegistry(const nlohmann::json& doc);

// Parses `text` and runs both validators. A validator failure is reported as
// FailedPrecondition listing every violation.
absl::StatusOr<PatternRegistry> LoadRegistry(std::string_view text);
absl::StatusOr<PatternRegistry> LoadRegistryFile(const std::string& path);

// PASS iff every inverse entry A -> B has the reverse entry B -> A.
ValidationReport ValidateInverses(const PatternRegistry& reg);

// PASS iff every composition target is a registered pattern.
ValidationReport ValidateCompositionClosure(const PatternRegistry& reg);

// Returns nullopt for an undefined product. Unknown names are NotFound.
absl::StatusOr<std::optional<std::string>> Compose(const PatternRegistry& reg,
                                                   std::string_view a,
                                                   std::string_view b);

inline constexpr double kFuzzyMatchThreshold = 0.4;

struct PatternMatch {
  const DynamicPattern* pattern = nullptr;
  double score = 0.0;
};

// 2 * LCS(a, b) / (|a| + |b|) on lower-cased input; 1.0 for two empty
// strings.
double LcsRatio(std::string_view a, std::string_view b);

// Exact triple lookup (score 1.0), else the best fuzzy candidate scoring at
// least kFuzzyMatchThreshold. The fuzzy score is the mean of the three
// per-component LcsRatio values; ties go to the lexicographically smallest
// name.
std::optional<PatternMatch> LookupPatternByStrings(const PatternRegistry& reg,
                                                   std::string_view src,
                                                   std::string_view rel,
                                                   std::string_view tgt);

struct WeightedPattern {
  const DynamicPattern* pattern = nullptr;
  double weight = 0.0;
};

// Normalised Herfindahl-Hirschman concentration of weight across the eight
// semantic domains: (HHI - 1/8) / (1 - 1/8), clamped to [0, 1].
absl::StatusOr<double> CouplingAsymmetry(std::span<const WeightedPattern> active);

}  // namespace patsim

#endif  // PATSIM_ONTOLOGY_H_
