/* Copyright 2026 The FDIN Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef FDIN_CLI_H_
#define FDIN_CLI_H_

namespace fdin {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Entry point of the `fdin` tool: subcommands synth, train, eval, infer,
// robustness, gradcheck and export-l.
int RunCli(int argc, char** argv);

}  // namespace fdin

#endif  // FDIN_CLI_H_
