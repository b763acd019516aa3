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

#include "patsim/cli.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "patsim/serialize.h"
#include "patsim/service.h"

#ifndef PATSIM_DATA_DIR
#define PATSIM_DATA_DIR "data"
#endif

namespace patsim {
namespace {

using nlohmann::json;

std::string EnvOr(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return (v != nullptr && *v != '\0') ? std::string(v) : fallback;
}

std::string F(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
  return buf;
}

int Fail(std::ostream& err, const absl::Status& s) {
  err << "error: " << s.message() << "\n";
  return kExitUsage;
}

void PrintForecast(const json& r, bool trace, std::ostream& out) {
  out << "initial:      " << absl::StrJoin(r["initial"].get<std::vector<std::string>>(), ", ")
      << "\n";
  out << "converged_at: " << r["converged_at"].get<int>()
      << (r["halted_on_fixpoint"].get<bool>() ? " (fixpoint)" : " (horizon)") << "\n";
  out << "primary:      " << r["primary"].get<std::string>() << "\n";
  out << "secondary:    "
      << (r["secondary"].is_null() ? std::string("-") : r["secondary"].get<std::string>())
      << "\n";
  std::vector<std::string> bif;
  for (const auto& b : r["bifurcation_points"]) bif.push_back(std::to_string(b.get<int>()));
  out << "bifurcation:  " << (bif.empty() ? "none" : absl::StrCat("step ", absl::StrJoin(bif, ", ")))
      << "\n";
  out << "c0 / c_final: " << F(r["c0"].get<double>()) << " / " << F(r["c_final"].get<double>())
      << "\n";
  out << "attractors:\n";
  for (const auto& a : r["attractors"]) {
    out << "  " << F(a["posterior"].get<double>()) << "  " << a["name"].get<std::string>()
        << "\n";
  }
  if (!trace) return;
  for (const auto& s : r["steps"]) {
    out << "\nstep " << s["step"].get<int>() << "  Z=" << F(s["partition_z"].get<double>(), 6)
        << (s["phase_transition"].get<bool>() ? "  [phase]" : "")
        << (s["bifurcation"].get<bool>() ? "  [bifurcation]" : "") << "\n";
    for (const auto& c : s["fired"]) {
      std::string src = c["source_a"].get<std::string>();
      if (!c["source_b"].is_null()) src += " + " + c["source_b"].get<std::string>();
      out << "  " << F(c["normalized_posterior"].get<double>()) << "  " << src << " -> "
          << c["target"].get<std::string>() << "   [" << c["trace"].get<std::string>() << "]\n";
    }
    out << "  weights:";
    for (auto it = s["active"].begin(); it != s["active"].end(); ++it) {
      out << "\n    " << F(it.value().get<double>()) << "  " << it.key();
    }
    out << "\n";
  }
}

void PrintAnalysis(const json& r, std::ostream& out) {
  out << r["conclusion"]["text"].get<std::string>() << "\n\n";
  out << "composite_confidence: " << F(r["conclusion"]["composite_confidence"].get<double>())
      << "\n";
  out << "events:\n";
  for (const auto& e : r["events"]) {
    out << "  " << F(e["confidence"].get<double>(), 2) << "  "
        << e["event_type"].get<std::string>() << "\n";
  }
  out << "active patterns:\n";
  for (const auto& a : r["patterns"]["active"]) {
    out << "  " << F(a["weight"].get<double>()) << "  " << a["name"].get<std::string>() << "\n";
  }
  out << "derived:\n";
  for (const auto& c : r["probability_tree"]["derived"]) {
    out << "  " << F(c["normalized_posterior"].get<double>()) << "  "
        << c["target"].get<std::string>() << "   [" << c["trace"].get<std::string>() << "]\n";
  }
  out << "driving factors:\n";
  for (const auto& f : r["patterns"]["driving_factors"]) {
    out << "  " << f["statement"].get<std::string>() << "\n";
  }
  out << "state vector (dominant "
      << r["lie_algebra"]["dominant_dimension"]["name"].get<std::string>() << "):\n";
  for (const auto& d : r["lie_algebra"]["dimensions"]) {
    out << "  " << d["name"].get<std::string>() << ": " << F(d["value"].get<double>()) << "\n";
  }
}

}  // namespace

std::string DefaultRegistryPath() {
  return EnvOr("PATSIM_REGISTRY", std::string(PATSIM_DATA_DIR) + "/registry.json");
}

std::string DefaultPipelinePath() {
  return EnvOr("PATSIM_PIPELINE", std::string(PATSIM_DATA_DIR) + "/pipeline.json");
}

int RunCli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Pattern semigroup forecaster"};
  app.require_subcommand(1);

  std::string registry_path = DefaultRegistryPath();
  std::string pipeline_path = DefaultPipelinePath();
  std::string format = "human";

  auto* validate = app.add_subcommand("validate", "Run the registry validators");
  validate->add_option("--registry", registry_path, "Registry document");

  auto* forecast = app.add_subcommand("forecast", "Forward-simulate a pattern set");
  std::string scenario;
  std::string patterns;
  int steps = 0;
  double lambda = 0.0;
  bool trace = false;
  auto* scen_opt = forecast->add_option("--scenario", scenario, "Named scenario");
  auto* pat_opt = forecast->add_option("--patterns", patterns, "Comma-separated pattern names");
  scen_opt->excludes(pat_opt);
  forecast->add_option("--steps", steps, "Horizon in steps")->check(CLI::PositiveNumber);
  forecast->add_option("--lambda", lambda, "Step decay in (0, 1]");
  forecast->add_option("--format", format)->check(CLI::IsMember({"human", "machine"}));
  forecast->add_flag("--trace", trace, "Print every step's transitions");
  forecast->add_option("--registry", registry_path, "Registry document");

  auto* analyze = app.add_subcommand("analyze", "Run the text analysis pipeline");
  std::string text_path;
  double verifiability = 1.0;
  double kg_consistency = 1.0;
  analyze->add_option("--text", text_path, "Input file, or - for stdin")->required();
  analyze->add_option("--format", format)->check(CLI::IsMember({"human", "machine"}));
  analyze->add_option("--verifiability", verifiability);
  analyze->add_option("--kg-consistency", kg_consistency);
  analyze->add_option("--registry", registry_path, "Registry document");
  analyze->add_option("--pipeline", pipeline_path, "Event rules / hints document");

  auto* scenarios = app.add_subcommand("scenarios", "List named scenarios");
  scenarios->add_option("--format", format)->check(CLI::IsMember({"human", "machine"}));
  scenarios->add_option("--registry", registry_path, "Registry document");

  auto* serve = app.add_subcommand("serve", "Start the HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string trace_path;
  serve->add_option("--port", port);
  serve->add_option("--host", host);
  serve->add_option("--registry", registry_path, "Registry document");
  serve->add_option("--pipeline", pipeline_path, "Event rules / hints document");
  serve->add_option("--traces", trace_path, "Append-only trace file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  if (validate->parsed()) {
    std::ifstream file(registry_path, std::ios::binary);
    if (!file) return Fail(err, absl::NotFoundError(absl::StrCat("cannot open ", registry_path)));
    std::stringstream buf;
    buf << file.rdbuf();
    json doc = json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded()) return Fail(err, absl::InvalidArgumentError("malformed JSON document"));
    auto reg = ParseRegistry(doc);
    if (!reg.ok()) return Fail(err, reg.status());
    ValidationReport inverses = ValidateInverses(*reg);
    ValidationReport closure = ValidateCompositionClosure(*reg);
    out << inverses.ToString() << "\n" << closure.ToString() << "\n";
    out << reg->patterns.size() << " patterns, " << reg->composition.size()
        << " composition rules, " << reg->inverses.size() << " inverse entries\n";
    return inverses.ok() && closure.ok() ? kExitOk : kExitValidationFailed;
  }

  auto reg = LoadRegistryFile(registry_path);
  if (!reg.ok()) {
    err << "error: " << reg.status().message() << "\n";
    return reg.status().code() == absl::StatusCode::kFailedPrecondition ? kExitValidationFailed
                                                                        : kExitUsage;
  }

  if (forecast->parsed()) {
    json body;
    if (!scenario.empty()) {
      body["scenario"] = scenario;
    } else if (!patterns.empty()) {
      std::vector<std::string> names = absl::StrSplit(patterns, ',', absl::SkipWhitespace());
      body["patterns"] = names;
    } else {
      err << "error: forecast needs --scenario or --patterns\n";
      return kExitUsage;
    }
    json config = json::object();
    if (steps > 0) config["horizon_steps"] = steps;
    if (lambda != 0.0) config["lambda"] = lambda;
    if (!config.empty()) body["config"] = config;

    auto req = ParseForecastRequest(body, *reg);
    if (!req.ok()) return Fail(err, req.status());
    auto result = RunForecast(*req, *reg);
    if (!result.ok()) return Fail(err, result.status());
    if (format == "machine") {
      out << CanonicalDump(*result) << "\n";
    } else {
      if (req->scenario) out << "scenario:     " << *req->scenario << "\n";
      PrintForecast(*result, trace, out);
    }
    return kExitOk;
  }

  if (scenarios->parsed()) {
    json list = json::array();
    for (const auto& [name, s] : reg->scenarios) list.push_back(ToJson(s));
    if (format == "machine") {
      out << CanonicalDump(list) << "\n";
      return kExitOk;
    }
    for (const auto& [name, s] : reg->scenarios) {
      out << name << "\n    " << absl::StrJoin(s.initial_patterns, ", ") << "\n";
      if (!s.description.empty()) out << "    " << s.description << "\n";
    }
    return kExitOk;
  }

  auto tables = LoadPipelineTablesFile(pipeline_path);
  if (!tables.ok()) return Fail(err, tables.status());

  if (analyze->parsed()) {
    std::string text;
    if (text_path == "-") {
      std::stringstream buf;
      buf << in.rdbuf();
      text = buf.str();
    } else {
      std::ifstream file(text_path, std::ios::binary);
      if (!file) return Fail(err, absl::NotFoundError(absl::StrCat("cannot open ", text_path)));
      std::stringstream buf;
      buf << file.rdbuf();
      text = buf.str();
    }
    auto req = ParseAnalyzeRequest(
        {{"text", text}, {"verifiability", verifiability}, {"kg_consistency", kg_consistency}});
    if (!req.ok()) return Fail(err, req.status());
    auto result = RunAnalyze(*req, *reg, *tables);
    if (!result.ok()) return Fail(err, result.status());
    if (format == "machine") {
      out << CanonicalDump(*result) << "\n";
    } else {
      PrintAnalysis(*result, out);
    }
    return kExitOk;
  }

  if (serve->parsed()) {
    std::unique_ptr<TraceStore> store;
    if (!trace_path.empty()) {
      auto opened = TraceStore::Open(trace_path);
      if (!opened.ok()) return Fail(err, opened.status());
      store = *std::move(opened);
    }
    Service service(*std::move(reg), *std::move(tables), std::move(store));
    HttpServer server(service);
    auto bound = server.Start(host, port);
    if (!bound.ok()) return Fail(err, bound.status());
    out << "listening on http://" << host << ":" << *bound << "\n" << std::flush;
    server.Wait();
    return kExitOk;
  }
  return kExitUsage;
}

}  // namespace patsim
