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

#include "patsim/service.h"

#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "httplib.h"
#include "patsim/serialize.h"

namespace patsim {
namespace {

using nlohmann::json;

constexpr char kJson[] = "application/json";

HttpResponse JsonResponse(int status, const json& doc) {
  HttpResponse r;
  r.status = status;
  r.body = CanonicalDump(doc);
  r.headers["Content-Type"] = kJson;
  return r;
}

HttpResponse ErrorResponse(const absl::Status& status) {
  return JsonResponse(HttpStatusFor(status),
                      {{"error", std::string(status.message())},
                       {"code", absl::StatusCodeToString(status.code())}});
}

absl::StatusOr<json> ParseBody(std::string_view body) {
  json doc = json::parse(body.begin(), body.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    return absl::InvalidArgumentError("request body must be a JSON object");
  }
  return doc;
}

}  // namespace

json ForecastRequest::Echo() const {
  json out;
  if (scenario) {
    out["scenario"] = *scenario;
  } else {
    out["patterns"] = patterns;
  }
  out["config"] = ToJson(config);
  return out;
}

absl::StatusOr<ForecastRequest> ParseForecastRequest(const json& body,
                                                     const PatternRegistry& reg) {
  if (!body.is_object()) return absl::InvalidArgumentError("request must be an object");
  for (auto it = body.begin(); it != body.end(); ++it) {
    if (it.key() != "patterns" && it.key() != "scenario" && it.key() != "config") {
      return absl::InvalidArgumentError(absl::StrCat("unknown field '", it.key(), "'"));
    }
  }
  bool has_patterns = body.contains("patterns");
  bool has_scenario = body.contains("scenario");
  if (has_patterns == has_scenario) {
    return absl::InvalidArgumentError("give exactly one of 'patterns' or 'scenario'");
  }

  ForecastRequest req;
  if (has_scenario) {
    if (!body["scenario"].is_string()) {
      return absl::InvalidArgumentError("'scenario' must be a string");
    }
    std::string name = body["scenario"].get<std::string>();
    auto it = reg.scenarios.find(name);
    if (it == reg.scenarios.end()) {
      return absl::NotFoundError(absl::StrCat("unknown scenario '", name, "'"));
    }
    req.scenario = name;
    req.patterns = it->second.initial_patterns;
  } else {
    const json& list = body["patterns"];
    if (!list.is_array() || list.empty()) {
      return absl::InvalidArgumentError("'patterns' must be a non-empty array of names");
    }
    std::vector<std::string> unknown;
    for (const auto& item : list) {
      if (!item.is_string()) {
        return absl::InvalidArgumentError("'patterns' must hold strings");
      }
      std::string name = item.get<std::string>();
      if (!reg.Contains(name)) unknown.push_back(name);
      req.patterns.push_back(std::move(name));
    }
    if (!unknown.empty()) {
      return absl::FailedPreconditionError(
          absl::StrCat("unregistered pattern names: ", absl::StrJoin(unknown, ", ")));
    }
  }
  if (body.contains("config")) {
    if (auto s = ApplyConfigOverrides(body["config"], req.config); !s.ok()) return s;
  }
  return req;
}

absl::StatusOr<json> RunForecast(const ForecastRequest& request,
                                 const PatternRegistry& reg) {
  auto result = Simulate(reg, request.patterns, request.config);
  if (!result.ok()) return result.status();
  return ToJson(*result);
}

json AnalyzeRequest::Echo() const {
  return {{"text", text},
          {"verifiability", options.verifiability},
          {"kg_consistency", options.kg_consistency}};
}

absl::StatusOr<AnalyzeRequest> ParseAnalyzeRequest(const json& body) {
  if (!body.is_object()) return absl::InvalidArgumentError("request must be an object");
  if (!body.contains("text") || !body["text"].is_string()) {
    return absl::InvalidArgumentError("'text' must be a string");
  }
  AnalyzeRequest req;
  req.text = body["text"].get<std::string>();
  for (auto it = body.begin(); it != body.end(); ++it) {
    const std::string& key = it.key();
    if (key == "text") continue;
    double* slot = nullptr;
    if (key == "verifiability") slot = &req.options.verifiability;
    if (key == "kg_consistency") slot = &req.options.kg_consistency;
    if (slot == nullptr) {
      return absl::InvalidArgumentError(absl::StrCat("unknown field '", key, "'"));
    }
    if (!it.value().is_number()) {
      return absl::InvalidArgumentError(absl::StrCat("'", key, "' must be a number"));
    }
    *slot = it.value().get<double>();
  }
  if (auto s = req.options.Validate(); !s.ok()) return s;
  return req;
}

absl::StatusOr<json> RunAnalyze(const AnalyzeRequest& request,
                                const PatternRegistry& reg,
                                const PipelineTables& tables, TextWriter* writer) {
  auto report = RunAnalysis(request.text, reg, tables, request.options, writer);
  if (!report.ok()) return report.status();
  return ToJson(*report);
}

int HttpStatusFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 200;
    case absl::StatusCode::kInvalidArgument:
      return 400;
    case absl::StatusCode::kNotFound:
      return 404;
    case absl::StatusCode::kFailedPrecondition:
      return 422;
    default:
      return 500;
  }
}

Service::Service(PatternRegistry registry, PipelineTables tables,
                 std::unique_ptr<TraceStore> store, TextWriter* writer)
    : registry_(std::move(registry)),
      tables_(std::move(tables)),
      registry_hash_(Sha256Hex(CanonicalDump(ToJson(registry_)))),
      store_(store ? std::move(store) : std::make_unique<TraceStore>()),
      writer_(writer) {}

HttpResponse Service::Handle(std::string_view method, std::string_view path,
                             std::string_view body) const {
  if (method == "GET") {
    if (path == "/health") {
      return JsonResponse(200, {{"status", "ok"}, {"registry_hash", registry_hash_}});
    }
    if (path == "/patterns") return JsonResponse(200, ToJson(registry_));
    if (path == "/scenarios") {
      json list = json::array();
      for (const auto& [name, s] : registry_.scenarios) list.push_back(ToJson(s));
      return JsonResponse(200, list);
    }
    constexpr std::string_view kTraces = "/traces/";
    if (path.starts_with(kTraces)) return Trace(path.substr(kTraces.size()));
  } else if (method == "POST") {
    if (path == "/forecast") return Forecast(body);
    if (path == "/analyze") return Analyze(body);
  }
  return ErrorResponse(absl::NotFoundError(absl::StrCat("no route for ", std::string(method), " ", std::string(path))));
}

HttpResponse Service::Forecast(std::string_view body) const {
  auto doc = ParseBody(body);
  if (!doc.ok()) return ErrorResponse(doc.status());
  auto req = ParseForecastRequest(*doc, registry_);
  if (!req.ok()) return ErrorResponse(req.status());
  auto result = RunForecast(*req, registry_);
  if (!result.ok()) return ErrorResponse(result.status());
  HttpResponse r = JsonResponse(200, *result);
  auto trace = store_->Append("forecast", req->Echo(), *result);
  if (trace.ok()) r.headers["X-Trace-Id"] = trace->id;
  return r;
}

HttpResponse Service::Analyze(std::string_view body) const {
  auto doc = ParseBody(body);
  if (!doc.ok()) return ErrorResponse(doc.status());
  auto req = ParseAnalyzeRequest(*doc);
  if (!req.ok()) return ErrorResponse(req.status());
  auto result = RunAnalyze(*req, registry_, tables_, writer_);
  if (!result.ok()) return ErrorResponse(result.status());
  HttpResponse r = JsonResponse(200, *result);
  auto trace = store_->Append("analyze", req->Echo(), *result);
  if (trace.ok()) r.headers["X-Trace-Id"] = trace->id;
  return r;
}

HttpResponse Service::Trace(std::string_view id) const {
  auto trace = store_->Get(id);
  if (!trace) return ErrorResponse(absl::NotFoundError(absl::StrCat("unknown trace '", std::string(id), "'")));
  return JsonResponse(200, trace->ToJson());
}

struct HttpServer::Impl {
  explicit Impl(const Service& s) : service(s) {}
  const Service& service;
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(const Service& service) : impl_(std::make_unique<Impl>(service)) {
  auto& server = impl_->server;
  const Service* svc = &impl_->service;
  auto forward = [svc](const httplib::Request& req, httplib::Response& res) {
    HttpResponse out = svc->Handle(req.method, req.path, req.body);
    res.status = out.status;
    for (const auto& [k, v] : out.headers) {
      if (k != "Content-Type") res.set_header(k, v);
    }
    res.set_content(out.body, kJson);
  };
  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Headers", "Content-Type"},
                              {"Access-Control-Expose-Headers", "X-Trace-Id"}});
  server.Get(R"(/.*)", forward);
  server.Post(R"(/.*)", forward);
  server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
}

HttpServer::~HttpServer() { Stop(); }

absl::StatusOr<int> HttpServer::Start(const std::string& host, int port) {
  int bound = port == 0 ? impl_->server.bind_to_any_port(host.c_str())
                        : (impl_->server.bind_to_port(host.c_str(), port) ? port : -1);
  if (bound < 0) {
    return absl::UnavailableError(absl::StrCat("cannot bind ", host, ":", port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void HttpServer::Wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void HttpServer::Stop() {
  impl_->server.stop();
  Wait();
}

}  // namespace patsim
