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

#ifndef FDIN_GRADCHECK_H_
#define FDIN_GRADCHECK_H_

#include <cstdint>
#include <string>
#include <vector>

namespace fdin {

inline constexpr double kGradcheckTolF32 = 1e-3;
inline constexpr double kGradcheckTolF64 = 1e-6;

struct GradcheckOptions {
  uint64_t seed = 0;
  // Module whose analytic gradient is deliberately scaled before comparison,
  // to prove the harness can fail. Empty for a real run.
  std::string corrupt;
};

struct GradcheckResult {
  std::string module;
  int entries = 0;  // parameter entries compared per precision
  double max_rel_error_f32 = 0.0;
  double max_rel_error_f64 = 0.0;
  bool pass = false;
};

// Learnable modules covered, each exactly once.
std::vector<std::string> GradcheckModules();

// For every parameter tensor of every module, the entry with the largest
// analytic gradient is compared with a central difference of
// loss = sum(r * output), r fixed random. Errors are relative, with the
// denominator floored at 1% of the module's largest gradient so tensors
// whose gradient vanishes by construction (a bias feeding a batch norm) do
// not divide noise by zero.
std::vector<GradcheckResult> RunGradchecks(const GradcheckOptions& options);

}  // namespace fdin

#endif  // FDIN_GRADCHECK_H_
