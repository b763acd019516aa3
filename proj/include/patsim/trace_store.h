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

#ifndef PATSIM_TRACE_STORE_H_
#define PATSIM_TRACE_STORE_H_

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "json.hpp"

namespace patsim {

struct StoredTrace {
  // sha256(canonical(request_echo) + "\n" + canonical(result)).
  std::string id;
  // sha256(canonical(result)); re-running request_echo must reproduce it.
  std::string result_hash;
  std::string created_at;  // UTC, ISO 8601
  std::string request_kind;  // "forecast" or "analyze"
  nlohmann::json request_echo;
  nlohmann::json result;

  nlohmann::json ToJson() const;
};

// Content-addressed, append-only store. When backed by a file, each trace is
// one canonical JSON line; existing lines are loaded on Open(). Appends are
// serialised by an internal mutex.
class TraceStore {
 public:
  // In-memory only.
  TraceStore() = default;

  static absl::StatusOr<std::unique_ptr<TraceStore>> Open(const std::string& path);

  static std::string ComputeId(const nlohmann::json& request_echo,
                               const nlohmann::json& result);

  // Re-appending an identical (request, result) pair returns the stored
  // trace without writing a second line.
  absl::StatusOr<StoredTrace> Append(std::string_view kind,
                                     const nlohmann::json& request_echo,
                                     const nlohmann::json& result);

  std::optional<StoredTrace> Get(std::string_view id) const;
  std::size_t size() const;

 private:
  mutable std::mutex mu_;
  std::optional<std::string> path_;
  std::map<std::string, StoredTrace, std::less<>> traces_;
};

}  // namespace patsim

#endif  // PATSIM_TRACE_STORE_H_
