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

#include "patsim/serialize.h"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>

#include "absl/strings/str_cat.h"

namespace patsim {
namespace {

using nlohmann::json;

void DumpTo(const json& value, std::string& out) {
  switch (value.type()) {
    case json::value_t::null:
    case json::value_t::discarded:
      out += "null";
      return;
    case json::value_t::boolean:
      out += value.get<bool>() ? "true" : "false";
      return;
    case json::value_t::number_integer:
      out += std::to_string(value.get<std::int64_t>());
      return;
    case json::value_t::number_unsigned:
      out += std::to_string(value.get<std::uint64_t>());
      return;
    case json::value_t::number_float:
      out += FormatReal(value.get<double>());
      return;
    case json::value_t::string:
      out += value.dump(-1, ' ', /*ensure_ascii=*/false,
                        json::error_handler_t::replace);
      return;
    case json::value_t::binary:
      out += "null";
      return;
    case json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& item : value) {
        if (!first) out.push_back(',');
        first = false;
        DumpTo(item, out);
      }
      out.push_back(']');
      return;
    }
    case json::value_t::object: {
      // nlohmann::json objects are std::map-backed, so iteration is already
      // in byte order of the keys.
      out.push_back('{');
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out.push_back(',');
        first = false;
        DumpTo(json(it.key()), out);
        out.push_back(':');
        DumpTo(it.value(), out);
      }
      out.push_back('}');
      return;
    }
  }
}

json Vector(const PatternVector& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

json OptionalString(const std::optional<std::string>& s) {
  return s ? json(*s) : json(nullptr);
}

std::string_view KindName(TransitionKind kind) {
  return kind == TransitionKind::kComposition ? "composition" : "inverse";
}

// Human-readable rendering of how a candidate's posterior was obtained.
std::string Trace(const TransitionCandidate& c, double z) {
  std::string trace;
  if (c.kind == TransitionKind::kComposition) {
    trace = absl::StrCat(FormatReal(c.pi_a), " x ", FormatReal(c.pi_b.value_or(0.0)),
                         " x ", FormatReal(c.lie_sim), " x ",
                         FormatReal(c.decay_factor));
    if (c.consistency) {
      trace = absl::StrCat(trace, " x path(", FormatReal(*c.consistency), ")");
    }
  } else {
    trace = absl::StrCat("inverse ", FormatReal(c.pi_a));
  }
  return absl::StrCat(trace, " / ", FormatReal(z), " = ",
                      FormatReal(c.normalized_posterior));
}

json CandidateWithTrace(const TransitionCandidate& c, double z) {
  json out = ToJson(c);
  out["trace"] = Trace(c, z);
  return out;
}

json ActiveToJson(const ActivePattern& a) {
  json out;
  out["name"] = a.pattern->name;
  out["event_type"] = a.event_type;
  out["match_score"] = a.match_score;
  out["scaled_weight"] = a.scaled_weight;
  out["weight"] = a.weight;
  out["confidence_prior"] = a.pattern->confidence_prior;
  out["mechanism_class"] = a.pattern->mechanism_class;
  out["domain"] = std::string(DomainName(a.pattern->domain));
  out["vector"] = Vector(a.pattern->vector);
  return out;
}

json OptionalCandidate(const std::optional<TransitionCandidate>& c, double z) {
  return c ? CandidateWithTrace(*c, z) : json(nullptr);
}

}  // namespace

std::string FormatReal(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string CanonicalDump(const json& value) {
  std::string out;
  DumpTo(value, out);
  return out;
}

std::string Sha256Hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

json ToJson(const SimulationConfig& cfg) {
  json out;
  out["horizon_steps"] = cfg.horizon_steps;
  out["lambda"] = cfg.lambda;
  out["theta_phase"] = cfg.theta_phase;
  out["delta_bifurcation"] = cfg.delta_bifurcation;
  out["alpha_path"] = cfg.alpha_path;
  out["inverse_weight_factor"] = cfg.inverse_weight_factor;
  out["path_integration_enabled"] = cfg.path_integration_enabled;
  out["merge_rule"] = kMergeRule;
  return out;
}

json ToJson(const TransitionCandidate& c) {
  json out;
  out["source_a"] = c.source_a;
  out["source_b"] = OptionalString(c.source_b);
  out["target"] = c.target;
  out["kind"] = std::string(KindName(c.kind));
  out["pi_a"] = c.pi_a;
  out["pi_b"] = c.pi_b ? json(*c.pi_b) : json(nullptr);
  out["lie_sim"] = c.lie_sim;
  out["lie_sim_degenerate"] = c.lie_sim_degenerate;
  out["decay_factor"] = c.decay_factor;
  out["raw_weight"] = c.raw_weight;
  out["consistency"] = c.consistency ? json(*c.consistency) : json(nullptr);
  out["consistency_degenerate"] = c.consistency_degenerate;
  out["adjusted_weight"] = c.adjusted_weight;
  out["normalized_posterior"] = c.normalized_posterior;
  out["source_a_latent"] = c.source_a_latent;
  out["source_b_latent"] = c.source_b_latent;
  return out;
}

json ToJson(const StepState& s) {
  json out;
  out["step"] = s.step;
  out["active"] = json::object();
  for (const auto& [name, w] : s.active) out["active"][name] = w;
  out["state_vector"] = Vector(s.state_vector);
  out["fired"] = json::array();
  for (const auto& c : s.fired) out["fired"].push_back(CandidateWithTrace(c, s.partition_z));
  out["partition_z"] = s.partition_z;
  out["new_patterns"] = json::array();
  for (const auto& n : s.new_patterns) out["new_patterns"].push_back(n);
  out["phase_transition"] = s.phase_transition;
  out["bifurcation"] = s.bifurcation;
  return out;
}

json ToJson(const ForecastResult& r) {
  json out;
  out["initial"] = r.initial;
  out["steps"] = json::array();
  for (const auto& s : r.steps) out["steps"].push_back(ToJson(s));
  out["converged_at"] = r.converged_at;
  out["halted_on_fixpoint"] = r.halted_on_fixpoint;
  out["attractors"] = json::array();
  for (const auto& a : r.attractors) {
    out["attractors"].push_back({{"name", a.name}, {"posterior", a.posterior}});
  }
  out["primary"] = r.primary;
  out["secondary"] = OptionalString(r.secondary);
  out["bifurcation_points"] = r.bifurcation_points;
  out["c0"] = r.c0;
  out["c_final"] = r.c_final;
  out["config_echo"] = ToJson(r.config_echo);
  return out;
}

json ToJson(const ExtractedEvent& e) {
  json out;
  out["event_type"] = e.event_type;
  out["confidence"] = e.confidence;
  out["matched_keywords"] = e.matched_keywords;
  out["span_hints"] = e.span_hints;
  return out;
}

json ToJson(const AnalysisReport& r) {
  json out;

  json conclusion;
  conclusion["alpha_path"] = OptionalCandidate(r.alpha_path, r.partition_z);
  conclusion["beta_path"] = OptionalCandidate(r.beta_path, r.partition_z);
  conclusion["mean_prior"] = r.mean_prior;
  conclusion["composite_confidence"] = r.composite_confidence;
  conclusion["verifiability"] = r.verifiability;
  conclusion["kg_consistency"] = r.kg_consistency;
  conclusion["numeric_fields_locked"] = r.numeric_fields_locked;
  conclusion["text"] = r.conclusion_text;
  conclusion["source"] = r.conclusion_source;
  out["conclusion"] = std::move(conclusion);

  out["events"] = json::array();
  for (const auto& e : r.events) out["events"].push_back(ToJson(e));

  json patterns;
  patterns["active"] = json::array();
  for (const auto& a : r.active_patterns) patterns["active"].push_back(ActiveToJson(a));
  patterns["composition_chain"] = json::array();
  for (const auto& c : r.derived) {
    std::string link = c.source_b
                           ? absl::StrCat(c.source_a, " + ", *c.source_b, " -> ", c.target)
                           : absl::StrCat(c.source_a, " -> ", c.target, " (inverse)");
    patterns["composition_chain"].push_back(link);
  }
  patterns["driving_factors"] = json::array();
  for (const auto& f : r.driving_factors) {
    patterns["driving_factors"].push_back({{"mechanism_class", f.mechanism_class},
                                           {"weight", f.weight},
                                           {"outcomes", f.outcomes},
                                           {"statement", f.statement}});
  }
  patterns["coupling_asymmetry"] = r.coupling_asymmetry;
  out["patterns"] = std::move(patterns);

  json tree;
  tree["formula"] = "prior_A x prior_B x lie_similarity / Z";
  tree["partition_z"] = r.partition_z;
  tree["total_candidates"] = r.total_candidates;
  tree["derived"] = json::array();
  for (const auto& c : r.derived) tree["derived"].push_back(CandidateWithTrace(c, r.partition_z));
  out["probability_tree"] = std::move(tree);

  json lie;
  lie["state_vector"] = Vector(r.state_vector);
  lie["dimensions"] = json::array();
  for (std::size_t d = 0; d < kDims; ++d) {
    lie["dimensions"].push_back(
        {{"name", std::string(kDimensionNames[d])}, {"value", r.state_vector[d]}});
  }
  lie["dominant_dimension"] = {{"index", r.dominant},
                               {"name", std::string(kDimensionNames[r.dominant])}};
  lie["projection_2d"] = json::array();
  lie["projection_labels"] = json::array();
  for (std::size_t i = 0; i < r.projection_2d.size(); ++i) {
    lie["projection_2d"].push_back({r.projection_2d[i].x, r.projection_2d[i].y});
    if (i < r.active_patterns.size()) {
      lie["projection_labels"].push_back(r.active_patterns[i].pattern->name);
    }
  }
  out["lie_algebra"] = std::move(lie);

  out["notes"] = r.notes;
  return out;
}

json LockedFields(const AnalysisReport& r) {
  json out = ToJson(r);
  out["conclusion"].erase("text");
  out["conclusion"].erase("source");
  out.erase("notes");
  return out;
}

json ToJson(const DynamicPattern& p) {
  json out;
  out["name"] = p.name;
  out["entity_src"] = std::string(EntityTypeName(p.entity_src));
  out["relation"] = std::string(RelationTypeName(p.relation));
  out["entity_tgt"] = std::string(EntityTypeName(p.entity_tgt));
  out["domain"] = std::string(DomainName(p.domain));
  out["typical_outcomes"] = p.typical_outcomes;
  out["mechanism_class"] = p.mechanism_class;
  out["inverse_pattern"] = OptionalString(p.inverse_pattern);
  out["composition_hints"] = p.composition_hints;
  out["confidence_prior"] = p.confidence_prior;
  out["provenance"] = p.provenance;
  if (p.published_inverse) out["published_inverse"] = *p.published_inverse;
  return out;
}

json ToJson(const NamedScenario& s) {
  return {{"name", s.name},
          {"initial_patterns", s.initial_patterns},
          {"description", s.description}};
}

json ToJson(const PatternRegistry& reg) {
  json out;
  out["patterns"] = json::array();
  out["vectors"] = json::object();
  for (const auto& [name, p] : reg.patterns) {
    out["patterns"].push_back(ToJson(p));
    out["vectors"][name] = Vector(p.vector);
  }
  out["composition_table"] = json::array();
  for (const auto& [key, target] : reg.composition) {
    auto prov = reg.composition_provenance.find(key);
    out["composition_table"].push_back(
        {key.first, key.second, target,
         prov == reg.composition_provenance.end() ? "paper" : prov->second});
  }
  out["inverse_table"] = json::array();
  for (const auto& [a, b] : reg.inverses) {
    auto prov = reg.inverse_provenance.find(PatternPair{a, b});
    out["inverse_table"].push_back(
        {a, b, prov == reg.inverse_provenance.end() ? "paper" : prov->second});
  }
  out["scenarios"] = json::object();
  out["scenario_descriptions"] = json::object();
  for (const auto& [name, s] : reg.scenarios) {
    out["scenarios"][name] = s.initial_patterns;
    out["scenario_descriptions"][name] = s.description;
  }
  return out;
}

absl::Status ApplyConfigOverrides(const json& overrides, SimulationConfig& cfg) {
  if (overrides.is_null()) return absl::OkStatus();
  if (!overrides.is_object()) {
    return absl::InvalidArgumentError("config overrides must be an object");
  }
  for (auto it = overrides.begin(); it != overrides.end(); ++it) {
    const std::string& key = it.key();
    const json& v = it.value();
    auto number = [&](double& slot) -> absl::Status {
      if (!v.is_number()) {
        return absl::InvalidArgumentError(absl::StrCat("'", key, "' must be a number"));
      }
      slot = v.get<double>();
      return absl::OkStatus();
    };
    absl::Status s;
    if (key == "horizon_steps") {
      if (!v.is_number_integer()) {
        return absl::InvalidArgumentError("'horizon_steps' must be an integer");
      }
      cfg.horizon_steps = v.get<int>();
    } else if (key == "lambda") {
      s = number(cfg.lambda);
    } else if (key == "theta_phase") {
      s = number(cfg.theta_phase);
    } else if (key == "delta_bifurcation") {
      s = number(cfg.delta_bifurcation);
    } else if (key == "alpha_path") {
      s = number(cfg.alpha_path);
    } else if (key == "inverse_weight_factor") {
      s = number(cfg.inverse_weight_factor);
    } else if (key == "path_integration_enabled") {
      if (!v.is_boolean()) {
        return absl::InvalidArgumentError("'path_integration_enabled' must be a boolean");
      }
      cfg.path_integration_enabled = v.get<bool>();
    } else if (key == "merge_rule") {
      if (!v.is_string() || v.get<std::string>() != kMergeRule) {
        return absl::InvalidArgumentError(
            absl::StrCat("unsupported merge_rule; only '", kMergeRule, "' exists"));
      }
    } else {
      return absl::InvalidArgumentError(absl::StrCat("unknown config key '", key, "'"));
    }
    if (!s.ok()) return s;
  }
  return cfg.Validate();
}

}  // namespace patsim
