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

// JSON documents for every engine result, and the canonical byte form used
// for hashing and for determinism checks.

#ifndef PATSIM_SERIALIZE_H_
#define PATSIM_SERIALIZE_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "json.hpp"
#include "patsim/forecaster.h"
#include "patsim/ontology.h"
#include "patsim/pipeline.h"

namespace patsim {

// UTF-8, keys sorted, no insignificant whitespace, reals rendered with 17
// significant digits (always containing '.' or an exponent). Non-finite
// reals render as null.
std::string CanonicalDump(const nlohmann::json& value);

// Renders one real the way CanonicalDump does.
std::string FormatReal(double x);

std::string Sha256Hex(std::string_view bytes);

nlohmann::json ToJson(const SimulationConfig& cfg);
nlohmann::json ToJson(const TransitionCandidate& c);
nlohmann::json ToJson(const StepState& s);
nlohmann::json ToJson(const ForecastResult& r);
nlohmann::json ToJson(const ExtractedEvent& e);
nlohmann::json ToJson(const AnalysisReport& r);
nlohmann::json ToJson(const DynamicPattern& p);
nlohmann::json ToJson(const NamedScenario& s);
// The registry in document form; ParseRegistry(ToJson(reg)) round-trips.
nlohmann::json ToJson(const PatternRegistry& reg);

// Every AnalysisReport field except the free-text ones (conclusion_text,
// conclusion_source, notes).
nlohmann::json LockedFields(const AnalysisReport& r);

// Applies recognised keys of `overrides` onto `cfg`; unknown keys and wrong
// types are InvalidArgument.
absl::Status ApplyConfigOverrides(const nlohmann::json& overrides,
                                  SimulationConfig& cfg);

}  // namespace patsim

#endif  // PATSIM_SERIALIZE_H_
