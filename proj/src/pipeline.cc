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

#include "patsim/pipeline.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_replace.h"
#include "patsim/serialize.h"

namespace patsim {
namespace {

using nlohmann::json;

// Text folded to lower-case words separated by single spaces, with a map
// from each folded byte back to its offset in the source.
struct FoldedText {
  std::string text;
  std::vector<std::size_t> origin;
};

FoldedText Fold(std::string_view in) {
  FoldedText out;
  out.text.push_back(' ');
  out.origin.push_back(0);
  for (std::size_t i = 0; i < in.size(); ++i) {
    auto c = static_cast<unsigned char>(in[i]);
    // Bytes >= 0x80 belong to multi-byte UTF-8 sequences; keep them as word
    // characters.
    if (std::isalnum(c) || c >= 0x80) {
      out.text.push_back(static_cast<char>(std::tolower(c)));
      out.origin.push_back(i);
    } else if (out.text.back() != ' ') {
      out.text.push_back(' ');
      out.origin.push_back(i);
    }
  }
  if (out.text.back() != ' ') {
    out.text.push_back(' ');
    out.origin.push_back(in.size());
  }
  return out;
}

std::string FoldKeyword(std::string_view keyword) {
  FoldedText f = Fold(keyword);
  return f.text;  // already padded with spaces on both ends
}

std::string Fixed(double x, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

absl::Status Invalid(std::string_view context, std::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat(std::string(context), ": ", std::string(what)));
}

absl::StatusOr<std::vector<std::string>> StringList(const json& v,
                                                    std::string_view context) {
  if (!v.is_array()) return Invalid(context, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& item : v) {
    if (!item.is_string()) return Invalid(context, "expected an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

absl::StatusOr<PipelineTables> ParsePipelineTables(const json& doc) {
  if (!doc.is_object()) return Invalid("pipeline", "document must be an object");
  PipelineTables tables;

  for (const auto& r : doc.value("event_rules", json::array())) {
    if (!r.is_object() || !r.contains("event_type") || !r["event_type"].is_string()) {
      return Invalid("event_rules", "each rule needs a string 'event_type'");
    }
    EventRule rule;
    rule.event_type = r["event_type"].get<std::string>();
    const std::string context = absl::StrCat("event rule '", rule.event_type, "'");
    if (!r.contains("trigger_groups") || !r["trigger_groups"].is_array() ||
        r["trigger_groups"].empty()) {
      return Invalid(context, "needs at least one trigger group");
    }
    for (const auto& g : r["trigger_groups"]) {
      auto group = StringList(g, context);
      if (!group.ok()) return group.status();
      if (group->empty()) return Invalid(context, "trigger groups must be non-empty");
      for (auto& kw : *group) {
        std::transform(kw.begin(), kw.end(), kw.begin(), [](unsigned char c) {
          return static_cast<char>(std::tolower(c));
        });
      }
      rule.trigger_groups.push_back(*std::move(group));
    }
    rule.base_confidence = r.value("base_confidence", 1.0);
    if (!(rule.base_confidence > 0.0 && rule.base_confidence <= 1.0)) {
      return Invalid(context, "base_confidence must lie in (0, 1]");
    }
    if (r.contains("companion_events")) {
      auto companions = StringList(r["companion_events"], context);
      if (!companions.ok()) return companions.status();
      rule.companion_events = *std::move(companions);
    }
    tables.event_rules.push_back(std::move(rule));
  }

  for (const auto& h : doc.value("domain_hints", json::array())) {
    if (!h.is_object() || !h.contains("event_type") || !h["event_type"].is_string()) {
      return Invalid("domain_hints", "each hint needs a string 'event_type'");
    }
    DomainHint hint;
    hint.event_type = h["event_type"].get<std::string>();
    const std::string context = absl::StrCat("domain hint '", hint.event_type, "'");
    if (!h.contains("candidate_triples") || !h["candidate_triples"].is_array() ||
        h["candidate_triples"].empty()) {
      return Invalid(context, "needs at least one candidate triple");
    }
    for (const auto& t : h["candidate_triples"]) {
      auto cells = StringList(t, context);
      if (!cells.ok()) return cells.status();
      if (cells->size() != 3) return Invalid(context, "triples have three entries");
      hint.candidate_triples.push_back({(*cells)[0], (*cells)[1], (*cells)[2]});
    }
    tables.domain_hints.push_back(std::move(hint));
  }

  json templates = doc.value("templates", json::object());
  if (!templates.is_object()) return Invalid("templates", "must be an object");
  for (auto it = templates.begin(); it != templates.end(); ++it) {
    if (!it.value().is_string()) return Invalid("templates", "values must be strings");
    if (it.key() == "_generic") {
      tables.generic_template = it.value().get<std::string>();
    } else if (it.key() == "_conclusion") {
      tables.conclusion_template = it.value().get<std::string>();
    } else {
      tables.templates[it.key()] = it.value().get<std::string>();
    }
  }
  return tables;
}

absl::StatusOr<PipelineTables> LoadPipelineTables(std::string_view text) {
  json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) return absl::InvalidArgumentError("pipeline: malformed JSON document");
  return ParsePipelineTables(doc);
}

absl::StatusOr<PipelineTables> LoadPipelineTablesFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open pipeline tables '", path, "'"));
  std::ostringstream buf;
  buf << in.rdbuf();
  return LoadPipelineTables(buf.str());
}

TriggerAmplification ComputeTriggerAmplification(double w_kg, double w_causal,
                                                 double delta_domain,
                                                 double kg_coefficient) {
  TriggerAmplification out{w_kg, w_causal, delta_domain, kg_coefficient, 0.0};
  // With w_kg == 0 the KG term vanishes rather than being redistributed.
  double raw = kg_coefficient * w_kg + w_causal + delta_domain;
  out.amplification = std::isnan(raw) ? 0.0 : std::clamp(raw, 0.0, 1.0);
  return out;
}

absl::Status AnalysisOptions::Validate() const {
  if (!(verifiability > 0.0 && verifiability <= 1.0)) {
    return absl::InvalidArgumentError("verifiability must lie in (0, 1]");
  }
  if (!(kg_consistency > 0.0 && kg_consistency <= 1.0)) {
    return absl::InvalidArgumentError("kg_consistency must lie in (0, 1]");
  }
  if (!(latent_partner_discount >= 0.0)) {
    return absl::InvalidArgumentError("latent_partner_discount must be non-negative");
  }
  if (!(inverse_weight_factor >= 0.0)) {
    return absl::InvalidArgumentError("inverse_weight_factor must be non-negative");
  }
  return absl::OkStatus();
}

std::vector<ExtractedEvent> ExtractEvents(std::string_view text,
                                          std::span<const EventRule> rules) {
  FoldedText folded = Fold(text);
  std::map<std::string, ExtractedEvent> by_type;

  auto emit = [&](const ExtractedEvent& e) {
    auto [it, inserted] = by_type.emplace(e.event_type, e);
    if (inserted) return;
    ExtractedEvent& held = it->second;
    if (e.confidence > held.confidence) {
      held = e;
    } else if (e.confidence == held.confidence) {
      for (std::size_t i = 0; i < e.matched_keywords.size(); ++i) {
        if (std::find(held.matched_keywords.begin(), held.matched_keywords.end(),
                      e.matched_keywords[i]) == held.matched_keywords.end()) {
          held.matched_keywords.push_back(e.matched_keywords[i]);
          held.span_hints.push_back(e.span_hints[i]);
        }
      }
    }
  };

  for (const EventRule& rule : rules) {
    ExtractedEvent event;
    event.event_type = rule.event_type;
    event.confidence = rule.base_confidence;
    bool fired = !rule.trigger_groups.empty();
    for (const auto& group : rule.trigger_groups) {
      bool group_hit = false;
      for (const auto& keyword : group) {
        std::string needle = FoldKeyword(keyword);
        if (needle.size() <= 2) continue;  // keyword had no word characters
        auto pos = folded.text.find(needle);
        if (pos == std::string::npos) continue;
        group_hit = true;
        if (std::find(event.matched_keywords.begin(), event.matched_keywords.end(),
                      keyword) == event.matched_keywords.end()) {
          event.matched_keywords.push_back(keyword);
          event.span_hints.push_back(folded.origin[pos + 1]);
        }
      }
      if (!group_hit) {
        fired = false;
        break;
      }
    }
    if (!fired) continue;
    emit(event);
    for (const auto& companion : rule.companion_events) {
      ExtractedEvent co = event;
      co.event_type = companion;
      emit(co);
    }
  }

  std::vector<ExtractedEvent> out;
  for (auto& [type, e] : by_type) out.push_back(std::move(e));
  std::stable_sort(out.begin(), out.end(),
                   [](const ExtractedEvent& a, const ExtractedEvent& b) {
                     if (a.confidence != b.confidence) return a.confidence > b.confidence;
                     return a.event_type < b.event_type;
                   });
  return out;
}

ActivationResult ActivatePatterns(std::span<const ExtractedEvent> events,
                                  std::span<const DomainHint> hints,
                                  const PatternRegistry& reg) {
  ActivationResult result;
  std::map<std::string, ActivePattern> by_name;
  for (const ExtractedEvent& event : events) {
    for (const DomainHint& hint : hints) {
      if (hint.event_type != event.event_type) continue;
      for (const CandidateTriple& t : hint.candidate_triples) {
        auto match = LookupPatternByStrings(reg, t.src, t.rel, t.tgt);
        if (!match) {
          result.notes.push_back(absl::StrCat("event '", event.event_type,
                                              "': no pattern for (", t.src, ", ",
                                              t.rel, ", ", t.tgt, ")"));
          continue;
        }
        ActivePattern ap;
        ap.pattern = match->pattern;
        ap.event_type = event.event_type;
        ap.match_score = match->score;
        ap.scaled_weight = match->pattern->confidence_prior * event.confidence;
        auto [it, inserted] = by_name.emplace(ap.pattern->name, ap);
        if (!inserted && ap.scaled_weight > it->second.scaled_weight) it->second = ap;
      }
    }
  }

  double total = 0.0;
  for (const auto& [name, ap] : by_name) total += ap.scaled_weight;
  for (auto& [name, ap] : by_name) {
    ap.weight = total > 0.0 ? ap.scaled_weight / total : 0.0;
    result.active.push_back(ap);
  }
  std::stable_sort(result.active.begin(), result.active.end(),
                   [](const ActivePattern& a, const ActivePattern& b) {
                     if (a.weight != b.weight) return a.weight > b.weight;
                     return a.pattern->name < b.pattern->name;
                   });
  return result;
}

TransitionList EnumerateTransitions(std::span<const ActivePattern> active,
                                    const PatternRegistry& reg,
                                    const AnalysisOptions& options) {
  TransitionList out;
  std::map<std::string, double, std::less<>> pi;
  for (const auto& ap : active) pi[ap.pattern->name] = ap.weight;
  if (pi.empty()) return out;

  std::vector<TransitionCandidate> candidates;
  for (const auto& [key, target] : reg.composition) {
    auto a = pi.find(key.first);
    auto b = pi.find(key.second);
    if (a == pi.end() && b == pi.end()) continue;
    const DynamicPattern* pa = reg.Find(key.first);
    const DynamicPattern* pb = reg.Find(key.second);
    const DynamicPattern* pc = reg.Find(target);
    if (pa == nullptr || pb == nullptr || pc == nullptr) continue;

    TransitionCandidate c;
    c.kind = TransitionKind::kComposition;
    c.source_a = key.first;
    c.source_b = key.second;
    c.target = target;
    c.source_a_latent = a == pi.end();
    c.source_b_latent = b == pi.end();
    c.pi_a = c.source_a_latent ? options.latent_partner_discount * pa->confidence_prior
                               : a->second;
    c.pi_b = c.source_b_latent ? options.latent_partner_discount * pb->confidence_prior
                               : b->second;
    Similarity sim = LieSimilarity(pa->vector, pb->vector, pc->vector);
    c.lie_sim = sim.value;
    c.lie_sim_degenerate = sim.degenerate;
    c.decay_factor = 1.0;
    c.raw_weight = c.pi_a * *c.pi_b * std::max(0.0, c.lie_sim);
    c.adjusted_weight = c.raw_weight;
    if (options.path_integration_enabled) {
      c = AdjustPathConsistency(std::move(c), reg, options.alpha_path);
    }
    candidates.push_back(std::move(c));
  }

  for (const auto& [name, weight] : pi) {
    auto inv = reg.inverses.find(name);
    if (inv == reg.inverses.end() || pi.contains(inv->second)) continue;
    TransitionCandidate c;
    c.kind = TransitionKind::kInverse;
    c.source_a = name;
    c.target = inv->second;
    c.pi_a = weight;
    c.raw_weight = options.inverse_weight_factor * weight;
    c.adjusted_weight = c.raw_weight;
    candidates.push_back(std::move(c));
  }

  double z = 0.0;
  for (const auto& c : candidates) z += c.adjusted_weight;
  for (auto& c : candidates) c.normalized_posterior = z > 0.0 ? c.adjusted_weight / z : 0.0;
  SortCandidates(candidates);
  out.total_candidates = candidates.size();
  out.partition_z = z;
  if (candidates.size() > options.max_derived) candidates.resize(options.max_derived);
  out.derived = std::move(candidates);
  return out;
}

absl::StatusOr<StateSummary> ComputeState(std::span<const ActivePattern> active) {
  if (active.empty()) return absl::InvalidArgumentError("no active patterns");
  StateSummary out;
  std::vector<PatternVector> points;
  for (const auto& ap : active) {
    for (std::size_t d = 0; d < kDims; ++d) {
      out.state_vector[d] += ap.weight * ap.pattern->vector[d];
    }
    points.push_back(ap.pattern->vector);
  }
  out.dominant = DominantDimension(out.state_vector);
  out.projection_2d = Project2d(points);
  return out;
}

std::vector<DrivingFactor> AggregateDrivingFactors(
    std::span<const ActivePattern> active, const PipelineTables& tables) {
  struct Group {
    double weight = 0.0;
    // (prior, outcome) pairs pooled over the group.
    std::vector<std::pair<double, std::string>> outcomes;
  };
  std::map<std::string, Group> groups;
  for (const auto& ap : active) {
    Group& g = groups[ap.pattern->mechanism_class];
    g.weight += ap.weight;
    for (const auto& o : ap.pattern->typical_outcomes) {
      g.outcomes.emplace_back(ap.pattern->confidence_prior, o);
    }
  }

  std::vector<DrivingFactor> out;
  for (auto& [mechanism, g] : groups) {
    std::stable_sort(g.outcomes.begin(), g.outcomes.end(),
                     [](const auto& a, const auto& b) {
                       if (a.first != b.first) return a.first > b.first;
                       return a.second < b.second;
                     });
    DrivingFactor f;
    f.mechanism_class = mechanism;
    f.weight = g.weight;
    for (const auto& [prior, outcome] : g.outcomes) {
      if (f.outcomes.size() == 3) break;
      if (std::find(f.outcomes.begin(), f.outcomes.end(), outcome) == f.outcomes.end()) {
        f.outcomes.push_back(outcome);
      }
    }
    auto tpl = tables.templates.find(mechanism);
    const std::string& pattern =
        tpl == tables.templates.end() ? tables.generic_template : tpl->second;
    f.statement = absl::StrReplaceAll(pattern, {{"{mechanism_class}", mechanism},
                                                {"{weight}", Fixed(f.weight)},
                                                {"{outcomes}", absl::StrJoin(f.outcomes, "; ")}});
    out.push_back(std::move(f));
  }
  std::stable_sort(out.begin(), out.end(), [](const DrivingFactor& a, const DrivingFactor& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.mechanism_class < b.mechanism_class;
  });
  return out;
}

namespace {

std::string TemplateConclusion(const AnalysisReport& r, const PipelineTables& tables) {
  if (!r.alpha_path) {
    return r.active_patterns.empty()
               ? "No registered pattern was activated by the supplied text."
               : absl::StrCat("Active patterns produced no transitions; composite confidence ",
                              Fixed(r.composite_confidence), ".");
  }
  std::vector<std::string> event_names;
  for (const auto& e : r.events) event_names.push_back(e.event_type);
  return absl::StrReplaceAll(
      tables.conclusion_template,
      {{"{alpha}", r.alpha_path->target},
       {"{alpha_posterior}", Fixed(r.alpha_path->normalized_posterior)},
       {"{beta}", r.beta_path ? r.beta_path->target : std::string("none")},
       {"{composite}", Fixed(r.composite_confidence)},
       {"{dominant}", std::string(kDimensionNames[r.dominant])},
       {"{events}", absl::StrJoin(event_names, ", ")}});
}

}  // namespace

AnalysisReport BuildConclusion(AnalysisReport report, const PipelineTables& tables,
                               TextWriter* writer) {
  report.alpha_path.reset();
  report.beta_path.reset();
  if (!report.derived.empty()) report.alpha_path = report.derived[0];
  if (report.derived.size() > 1) report.beta_path = report.derived[1];

  double prior_sum = 0.0;
  for (const auto& ap : report.active_patterns) prior_sum += ap.pattern->confidence_prior;
  report.mean_prior = report.active_patterns.empty()
                          ? 0.0
                          : prior_sum / static_cast<double>(report.active_patterns.size());
  report.composite_confidence =
      report.mean_prior * std::sqrt(report.verifiability * report.kg_consistency);
  report.numeric_fields_locked = true;

  report.conclusion_text = TemplateConclusion(report, tables);
  report.conclusion_source = "template";
  if (writer == nullptr) return report;

  const json locked = LockedFields(report);
  const std::string snapshot = CanonicalDump(locked);
  json handed = locked;
  absl::StatusOr<std::string> text = absl::UnknownError("writer did not run");
  try {
    text = writer->Write(handed);
  } catch (const std::exception& e) {
    text = absl::InternalError(absl::StrCat("writer threw: ", e.what()));
  } catch (...) {
    text = absl::InternalError("writer threw a non-standard exception");
  }
  if (CanonicalDump(handed) != snapshot) {
    std::clog << "patsim: text writer modified locked fields; changes discarded\n";
    report.notes.push_back("text writer modified locked fields; changes discarded");
  }
  if (text.ok() && !text->empty()) {
    report.conclusion_text = *std::move(text);
    report.conclusion_source = "writer";
  } else {
    report.notes.push_back(absl::StrCat(
        "text writer failed, template used: ",
        text.ok() ? std::string("empty text") : std::string(text.status().message())));
  }
  return report;
}

absl::StatusOr<AnalysisReport> RunAnalysis(std::string_view text,
                                           const PatternRegistry& reg,
                                           const PipelineTables& tables,
                                           const AnalysisOptions& options,
                                           TextWriter* writer) {
  if (auto s = options.Validate(); !s.ok()) return s;
  if (tables.event_rules.empty()) return absl::FailedPreconditionError("no event rules loaded");

  AnalysisReport report;
  report.verifiability = options.verifiability;
  report.kg_consistency = options.kg_consistency;
  report.events = ExtractEvents(text, tables.event_rules);

  ActivationResult activation = ActivatePatterns(report.events, tables.domain_hints, reg);
  report.active_patterns = std::move(activation.active);
  report.notes = std::move(activation.notes);

  TransitionList transitions = EnumerateTransitions(report.active_patterns, reg, options);
  report.derived = std::move(transitions.derived);
  report.total_candidates = transitions.total_candidates;
  report.partition_z = transitions.partition_z;

  if (!report.active_patterns.empty()) {
    auto state = ComputeState(report.active_patterns);
    if (!state.ok()) return state.status();
    report.state_vector = state->state_vector;
    report.dominant = state->dominant;
    report.projection_2d = std::move(state->projection_2d);

    std::vector<WeightedPattern> weighted;
    for (const auto& ap : report.active_patterns) weighted.push_back({ap.pattern, ap.weight});
    auto asym = CouplingAsymmetry(weighted);
    report.coupling_asymmetry = asym.ok() ? *asym : 0.0;
  }
  report.driving_factors = AggregateDrivingFactors(report.active_patterns, tables);
  return BuildConclusion(std::move(report), tables, writer);
}

}  // namespace patsim
