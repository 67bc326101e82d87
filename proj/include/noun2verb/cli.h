// Copyright 2026 The Noun2Verb Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// The noun2verb command-line front end. Every subcommand writes a
// manifest.json run manifest into --out before any other output.

#ifndef NOUN2VERB_CLI_H_
#define NOUN2VERB_CLI_H_

#include <ostream>
#include <string>
#include <string_view>

namespace noun2verb {

inline constexpr std::string_view kArtifactVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,       // Missing or malformed inputs.
  kExitNumerical = 3,  // Non-finite values during computation.
};

// Runs one subcommand. Ranked results and summaries go to out; usage text
// and diagnostics go to err.
int RunCli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

// Lowercase hex SHA-256.
std::string Sha256Hex(std::string_view bytes);
std::string Sha256File(const std::string &path);

}  // namespace noun2verb

#endif  // NOUN2VERB_CLI_H_
