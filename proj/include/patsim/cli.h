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

#ifndef PATSIM_CLI_H_
#define PATSIM_CLI_H_

#include <iosfwd>
#include <string>

namespace patsim {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitUsage = 2;

// Default data files: $PATSIM_REGISTRY / $PATSIM_PIPELINE when set,
// otherwise the copies shipped under data/.
std::string DefaultRegistryPath();
std::string DefaultPipelinePath();

// Subcommands: validate, forecast, analyze, scenarios, serve. `in` feeds
// `analyze --text -`.
int RunCli(int argc, const char* const* argv, std::istream& in, std::ostream& out,
           std::ostream& err);

}  // namespace patsim

#endif  // PATSIM_CLI_H_
