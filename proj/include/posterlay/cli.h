// Copyright 2026 The Posterlay Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// The `posterlay` command line. Subcommands: synth, ingest, stats, analyze,
// train-retriever, retrieve, generate, complete, eval, experiment, serve.
#ifndef POSTERLAY_CLI_H_
#define POSTERLAY_CLI_H_

#include <ostream>

namespace posterlay {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

// Runs one command line; argv[0] is the program name.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace posterlay

#endif  // POSTERLAY_CLI_H_
