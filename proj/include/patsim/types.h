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

#ifndef PATSIM_TYPES_H_
#define PATSIM_TYPES_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace patsim {

// Typed vocabulary of the ontology. The numeric values are not part of any
// file format; documents always carry the upper-case names.
enum class EntityType {
  kState,
  kAlliance,
  kParamilitary,
  kIdeology,
  kFirm,
  kFinancialOrg,
  kResource,
  kCurrency,
  kSupplyChain,
  kTech,
  kStandard,
  kPerson,
  kMedia,
  kTrust,
  kInstitution,
  kConflict,
  kNorm,
  kUnknown,
};

inline constexpr std::size_t kNumEntityTypes = 18;

enum class RelationType {
  kSanction,
  kMilitaryStrike,
  kCoerce,
  kBlockade,
  kSupport,
  kAlly,
  kAid,
  kAgree,
  kDependency,
  kTradeFlow,
  kSupply,
  kFinance,
  kSignal,
  kPropaganda,
  kLegitimize,
  kDelegitimize,
  kRegulate,
  kStandardize,
  kExclude,
  kIntegrate,
};

inline constexpr std::size_t kNumRelationTypes = 20;

enum class RelationCategory {
  kCoercive,
  kCooperative,
  kDependencyFlow,
  kStructural,
};

// The eight semantic domains a pattern can belong to. Only the first five
// are populated by the shipped registry; the rest are reserved but count
// towards the coupling-asymmetry baseline.
enum class SemanticDomain {
  kGeopolitics,
  kEconomics,
  kTechnology,
  kInformation,
  kMilitary,
  kSocial,
  kInstitutional,
  kEnvironmental,
};

inline constexpr std::size_t kNumDomains = 8;

// Upper-case canonical names, e.g. "FINANCIAL_ORG".
std::string_view EntityTypeName(EntityType type);
std::string_view RelationTypeName(RelationType type);
std::string_view RelationCategoryName(RelationCategory category);
// Lower-case names, e.g. "geopolitics".
std::string_view DomainName(SemanticDomain domain);

// Case-insensitive; spaces and hyphens are read as underscores. Anything
// unrecognised becomes kUnknown.
EntityType ParseEntityType(std::string_view text);
std::optional<RelationType> ParseRelationType(std::string_view text);
std::optional<SemanticDomain> ParseDomain(std::string_view text);

RelationCategory CategoryOf(RelationType type);

// Dimensions of the semantic vector space, in storage order.
inline constexpr std::size_t kDims = 8;
inline constexpr std::array<std::string_view, kDims> kDimensionNames = {
    "coercion",   "cooperation", "dependency", "information",
    "regulation", "military",    "economic",   "technology"};

using PatternVector = std::array<double, kDims>;

struct Triple {
  EntityType src = EntityType::kUnknown;
  RelationType relation = RelationType::kSanction;
  EntityType tgt = EntityType::kUnknown;

  auto operator<=>(const Triple&) const = default;
};

}  // namespace patsim

#endif  // PATSIM_TYPES_H_
