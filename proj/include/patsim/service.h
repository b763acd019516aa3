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

// Request handling shared by the CLI and the HTTP service, plus the HTTP
// routing itself.
//
// Status codes map onto HTTP as: InvalidArgument -> 400, NotFound -> 404,
// FailedPrecondition (unregistered pattern names) -> 422.

#ifndef PATSIM_SERVICE_H_
#define PATSIM_SERVICE_H_

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "patsim/forecaster.h"
#include "patsim/ontology.h"
#include "patsim/pipeline.h"
#include "patsim/trace_store.h"

namespace patsim {

struct ForecastRequest {
  std::vector<std::string> patterns;
  std::optional<std::string> scenario;
  SimulationConfig config;

  // Canonical form stored with traces; parsing it again yields an
  // equivalent request.
  nlohmann::json Echo() const;
};

// Body: {"patterns": [...]} or {"scenario": "name"}, plus optional
// "config": {SimulationConfig overrides}.
absl::StatusOr<ForecastRequest> ParseForecastRequest(const nlohmann::json& body,
                                                     const PatternRegistry& reg);
absl::StatusOr<nlohmann::json> RunForecast(const ForecastRequest& request,
                                           const PatternRegistry& reg);

struct AnalyzeRequest {
  std::string text;
  AnalysisOptions options;

  nlohmann::json Echo() const;
};

// Body: {"text": "...", "verifiability"?: x, "kg_consistency"?: y}.
absl::StatusOr<AnalyzeRequest> ParseAnalyzeRequest(const nlohmann::json& body);
absl::StatusOr<nlohmann::json> RunAnalyze(const AnalyzeRequest& request,
                                          const PatternRegistry& reg,
                                          const PipelineTables& tables,
                                          TextWriter* writer = nullptr);

struct HttpResponse {
  int status = 200;
  std::string body;
  std::map<std::string, std::string> headers;
};

int HttpStatusFor(const absl::Status& status);

class Service {
 public:
  Service(PatternRegistry registry, PipelineTables tables,
          std::unique_ptr<TraceStore> store, TextWriter* writer = nullptr);

  // Routes one request. Thread-safe.
  HttpResponse Handle(std::string_view method, std::string_view path,
                      std::string_view body) const;

  const PatternRegistry& registry() const { return registry_; }
  const std::string& registry_hash() const { return registry_hash_; }
  const TraceStore& traces() const { return *store_; }

 private:
  HttpResponse Forecast(std::string_view body) const;
  HttpResponse Analyze(std::string_view body) const;
  HttpResponse Trace(std::string_view id) const;

  const PatternRegistry registry_;
  const PipelineTables tables_;
  const std::string registry_hash_;
  std::unique_ptr<TraceStore> store_;
  TextWriter* writer_;
};

// HTTP front end over a Service. Listens on a background thread.
class HttpServer {
 public:
  explicit HttpServer(const Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks an ephemeral port. Returns the bound port.
  absl::StatusOr<int> Start(const std::string& host, int port);
  // Blocks until Stop() is called from elsewhere.
  void Wait();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace patsim

#endif  // PATSIM_SERVICE_H_
