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

#include "patsim/trace_store.h"

#include <chrono>
#include <ctime>
#include <fstream>
#include <memory>

#include "absl/strings/str_cat.h"
#include "patsim/serialize.h"

namespace patsim {
namespace {

using nlohmann::json;

std::string UtcNow() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

absl::StatusOr<StoredTrace> FromJson(const json& j) {
  if (!j.is_object()) return absl::DataLossError("trace line is not an object");
  StoredTrace t;
  try {
    t.id = j.at("id").get<std::string>();
    t.result_hash = j.at("result_hash").get<std::string>();
    t.created_at = j.at("created_at").get<std::string>();
    t.request_kind = j.at("request_kind").get<std::string>();
    t.request_echo = j.at("request_echo");
    t.result = j.at("result");
  } catch (const json::exception& e) {
    return absl::DataLossError(absl::StrCat("bad trace line: ", e.what()));
  }
  return t;
}

}  // namespace

json StoredTrace::ToJson() const {
  return {{"id", id},
          {"result_hash", result_hash},
          {"created_at", created_at},
          {"request_kind", request_kind},
          {"request_echo", request_echo},
          {"result", result}};
}

absl::StatusOr<std::unique_ptr<TraceStore>> TraceStore::Open(const std::string& path) {
  auto store = std::make_unique<TraceStore>();
  store->path_ = path;
  std::ifstream in(path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      return absl::DataLossError(absl::StrCat(path, ":", lineno, ": malformed trace line"));
    }
    auto t = FromJson(j);
    if (!t.ok()) return t.status();
    std::string id = t->id;
    store->traces_.emplace(std::move(id), *std::move(t));
  }
  return store;
}

std::string TraceStore::ComputeId(const json& request_echo, const json& result) {
  return Sha256Hex(absl::StrCat(CanonicalDump(request_echo), "\n", CanonicalDump(result)));
}

absl::StatusOr<StoredTrace> TraceStore::Append(std::string_view kind,
                                               const json& request_echo,
                                               const json& result) {
  StoredTrace t;
  t.id = ComputeId(request_echo, result);
  t.result_hash = Sha256Hex(CanonicalDump(result));
  t.request_kind = std::string(kind);
  t.request_echo = request_echo;
  t.result = result;

  std::lock_guard<std::mutex> lock(mu_);
  if (auto it = traces_.find(t.id); it != traces_.end()) return it->second;
  t.created_at = UtcNow();
  if (path_) {
    std::ofstream out(*path_, std::ios::app | std::ios::binary);
    if (!out) return absl::UnavailableError(absl::StrCat("cannot append to ", *path_));
    out << CanonicalDump(t.ToJson()) << '\n';
    out.flush();
    if (!out) return absl::UnavailableError(absl::StrCat("write failed on ", *path_));
  }
  traces_.emplace(t.id, t);
  return t;
}

std::optional<StoredTrace> TraceStore::Get(std::string_view id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = traces_.find(id);
  if (it == traces_.end()) return std::nullopt;
  return it->second;
}

std::size_t TraceStore::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return traces_.size();
}

}  // namespace patsim
