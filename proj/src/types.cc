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

#include "patsim/types.h"

#include <algorithm>
#include <cctype>

namespace patsim {
namespace {

constexpr std::array<std::string_view, kNumEntityTypes> kEntityNames = {
    "STATE",     "ALLIANCE",      "PARAMILITARY", "IDEOLOGY", "FIRM",
    "FINANCIAL_ORG", "RESOURCE",  "CURRENCY",     "SUPPLY_CHAIN", "TECH",
    "STANDARD",  "PERSON",        "MEDIA",        "TRUST",    "INSTITUTION",
    "CONFLICT",  "NORM",          "UNKNOWN"};

constexpr std::array<std::string_view, kNumRelationTypes> kRelationNames = {
    "SANCTION",   "MILITARY_STRIKE", "COERCE",       "BLOCKADE",
    "SUPPORT",    "ALLY",            "AID",          "AGREE",
    "DEPENDENCY", "TRADE_FLOW",      "SUPPLY",       "FINANCE",
    "SIGNAL",     "PROPAGANDA",      "LEGITIMIZE",   "DELEGITIMIZE",
    "REGULATE",   "STANDARDIZE",     "EXCLUDE",      "INTEGRATE"};

constexpr std::array<std::string_view, kNumDomains> kDomainNames = {
    "geopolitics", "economics", "technology",    "information",
    "military",    "social",    "institutional", "environmental"};

std::string Canonicalize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == ' ' || c == '-') {
      out.push_back('_');
    } else {
      out.push_back(static_cast<char>(
          std::toupper(static_cast<unsigned char>(c))));
    }
  }
  // Trim underscores introduced by surrounding whitespace.
  auto first = out.find_first_not_of('_');
  if (first == std::string::npos) return "";
  auto last = out.find_last_not_of('_');
  return out.substr(first, last - first + 1);
}

template <std::size_t N>
std::optional<std::size_t> IndexOf(const std::array<std::string_view, N>& names,
                                   std::string_view key) {
  auto it = std::find(names.begin(), names.end(), key);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

}  // namespace

std::string_view EntityTypeName(EntityType type) {
  return kEntityNames[static_cast<std::size_t>(type)];
}

std::string_view RelationTypeName(RelationType type) {
  return kRelationNames[static_cast<std::size_t>(type)];
}

std::string_view RelationCategoryName(RelationCategory category) {
  switch (category) {
    case RelationCategory::kCoercive:
      return "coercive";
    case RelationCategory::kCooperative:
      return "cooperative";
    case RelationCategory::kDependencyFlow:
      return "dependency_flow";
    case RelationCategory::kStructural:
      return "structural";
  }
  return "structural";
}

std::string_view DomainName(SemanticDomain domain) {
  return kDomainNames[static_cast<std::size_t>(domain)];
}

EntityType ParseEntityType(std::string_view text) {
  auto idx = IndexOf(kEntityNames, Canonicalize(text));
  if (!idx) return EntityType::kUnknown;
  return static_cast<EntityType>(*idx);
}

std::optional<RelationType> ParseRelationType(std::string_view text) {
  auto idx = IndexOf(kRelationNames, Canonicalize(text));
  if (!idx) return std::nullopt;
  return static_cast<RelationType>(*idx);
}

std::optional<SemanticDomain> ParseDomain(std::string_view text) {
  std::string key = Canonicalize(text);
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  auto idx = IndexOf(kDomainNames, key);
  if (!idx) return std::nullopt;
  return static_cast<SemanticDomain>(*idx);
}

RelationCategory CategoryOf(RelationType type) {
  // Relations are declared in blocks of four: coercive, cooperative,
  // dependency/flow; the remaining eight are structural.
  auto idx = static_cast<std::size_t>(type);
  if (idx < 4) return RelationCategory::kCoercive;
  if (idx < 8) return RelationCategory::kCooperative;
  if (idx < 12) return RelationCategory::kDependencyFlow;
  return RelationCategory::kStructural;
}

}  // namespace patsim
