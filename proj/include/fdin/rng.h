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

#ifndef FDIN_RNG_H_
#define FDIN_RNG_H_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace fdin {

// All randomness flows through an explicitly passed generator. The helpers
// below avoid std::*_distribution so sequences are identical across
// standard libraries.
using Rng = std::mt19937_64;

inline double Uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double Uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * Uniform01(rng);
}

// Integer uniform on the closed range [lo, hi].
inline int64_t UniformInt(Rng& rng, int64_t lo, int64_t hi) {
  const auto span = static_cast<uint64_t>(hi - lo) + 1;
  return lo + static_cast<int64_t>(rng() % span);
}

inline double Normal(Rng& rng) {
  double u1 = Uniform01(rng);
  const double u2 = Uniform01(rng);
  if (u1 < 1e-300) u1 = 1e-300;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline bool Bernoulli(Rng& rng, double p) { return Uniform01(rng) < p; }

}  // namespace fdin

#endif  // FDIN_RNG_H_
