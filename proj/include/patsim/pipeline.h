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

// Single-shot text analysis: keyword event extraction, pattern activation,
// transition enumeration, state vector, driving factors and a conclusion
// whose numeric fields are fixed before any text writer runs.

#ifndef PATSIM_PIPELINE_H_
#define PATSIM_PIPELINE_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "patsim/forecaster.h"
#include "patsim/lie_space.h"
#include "patsim/ontology.h"

namespace patsim {

struct EventRule {
  std::string event_type;
  // The rule fires when every group has at least one keyword in the text.
  std::vector<std::vector<std::string>> trigger_groups;
  double base_confidence = 1.0;
  std::vector<std::string> companion_events;
};

struct ExtractedEvent {
  std::string event_type;
  double confidence = 0.0;
  std::vector<std::string> matched_keywords;
  // Byte offsets into the original text, one per matched keyword.
  std::vector<std::size_t> span_hints;
};

struct CandidateTriple {
  std::string src;
  std::string rel;
  std::string tgt;
};

struct DomainHint {
  std::string event_type;
  std::vector<CandidateTriple> candidate_triples;
};

struct PipelineTables {
  std::vector<EventRule> event_rules;
  std::vector<DomainHint> domain_hints;
  // mechanism_class -> statement template. Placeholders: {mechanism_class},
  // {weight}, {outcomes}.
  std::map<std::string, std::string> templates;
  std::string generic_template =
      "{mechanism_class} (weight {weight}): {outcomes}";
  // Placeholders: {alpha}, {alpha_posterior}, {beta}, {composite},
  // {dominant}, {events}.
  std::string conclusion_template =
      "Primary path toward {alpha} (posterior {alpha_posterior}); "
      "alternative {beta}. Dominant dimension: {dominant}. "
      "Composite confidence {composite}.";
};

absl::StatusOr<PipelineTables> ParsePipelineTables(const nlohmann::json& doc);
absl::StatusOr<PipelineTables> LoadPipelineTables(std::string_view text);
absl::StatusOr<PipelineTables> LoadPipelineTablesFile(const std::string& path);

// clamp_[0,1](kg_coefficient * w_kg + w_causal + delta_domain).
struct TriggerAmplification {
  double w_kg = 0.0;
  double w_causal = 0.0;
  double delta_domain = 0.0;
  double kg_coefficient = 0.4;
  double amplification = 0.0;
};

TriggerAmplification ComputeTriggerAmplification(double w_kg, double w_causal,
                                                 double delta_domain,
                                                 double kg_coefficient = 0.4);

struct ActivePattern {
  const DynamicPattern* pattern = nullptr;
  std::string event_type;
  double match_score = 0.0;
  // confidence_prior * event confidence, before normalisation.
  double scaled_weight = 0.0;
  double weight = 0.0;
};

struct ActivationResult {
  std::vector<ActivePattern> active;
  std::vector<std::string> notes;
};

struct StateSummary {
  PatternVector state_vector{};
  std::size_t dominant = 0;
  std::vector<Point2> projection_2d;
};

struct DrivingFactor {
  std::string mechanism_class;
  double weight = 0.0;
  std::vector<std::string> outcomes;
  std::string statement;
};

struct AnalysisOptions {
  double verifiability = 1.0;
  double kg_consistency = 1.0;
  // Prior multiplier for a rule source that is not itself active.
  double latent_partner_discount = 0.5;
  double inverse_weight_factor = 0.20;
  bool path_integration_enabled = false;
  double alpha_path = 0.30;
  std::size_t max_derived = 5;

  absl::Status Validate() const;
};

struct TransitionList {
  std::vector<TransitionCandidate> derived;
  std::size_t total_candidates = 0;
  double partition_z = 0.0;
};

struct AnalysisReport {
  std::vector<ExtractedEvent> events;
  std::vector<ActivePattern> active_patterns;
  std::vector<TransitionCandidate> derived;
  std::size_t total_candidates = 0;
  double partition_z = 0.0;
  PatternVector state_vector{};
  std::size_t dominant = 0;
  std::vector<Point2> projection_2d;
  std::vector<DrivingFactor> driving_factors;
  std::optional<TransitionCandidate> alpha_path;
  std::optional<TransitionCandidate> beta_path;
  double mean_prior = 0.0;
  double composite_confidence = 0.0;
  double verifiability = 1.0;
  double kg_consistency = 1.0;
  double coupling_asymmetry = 0.0;
  std::string conclusion_text;
  // "template" or "writer".
  std::string conclusion_source = "template";
  bool numeric_fields_locked = true;
  std::vector<std::string> notes;
};

// Produces prose for the conclusion. `locked_fields` is a copy of every
// non-text report field; changes to it are detected and discarded.
class TextWriter {
 public:
  virtual ~TextWriter() = default;
  virtual absl::StatusOr<std::string> Write(nlohmann::json& locked_fields) = 0;
};

// Lower-cases text and rules, treating punctuation as whitespace, and matches
// keywords on word boundaries. Output is ordered by descending confidence,
// then event type.
std::vector<ExtractedEvent> ExtractEvents(std::string_view text,
                                          std::span<const EventRule> rules);

// Weight = confidence_prior * event confidence, duplicates keep the maximum,
// then normalised to sum 1. Ordered by descending weight, then name.
ActivationResult ActivatePatterns(std::span<const ExtractedEvent> events,
                                  std::span<const DomainHint> hints,
                                  const PatternRegistry& reg);

// Scans the whole composition table for rules with at least one active
// source. The inactive partner enters at latent_partner_discount * prior.
// Returns the top max_derived candidates by weight.
TransitionList EnumerateTransitions(std::span<const ActivePattern> active,
                                    const PatternRegistry& reg,
                                    const AnalysisOptions& options = {});

absl::StatusOr<StateSummary> ComputeState(std::span<const ActivePattern> active);

std::vector<DrivingFactor> AggregateDrivingFactors(
    std::span<const ActivePattern> active, const PipelineTables& tables);

// Fills alpha/beta paths, composite confidence and the conclusion text.
// `writer` may be null, in which case the template is used.
AnalysisReport BuildConclusion(AnalysisReport report, const PipelineTables& tables,
                               TextWriter* writer);

absl::StatusOr<AnalysisReport> RunAnalysis(std::string_view text,
                                           const PatternRegistry& reg,
                                           const PipelineTables& tables,
                                           const AnalysisOptions& options = {},
                                           TextWriter* writer = nullptr);

}  // namespace patsim

#endif  // PATSIM_PIPELINE_H_
