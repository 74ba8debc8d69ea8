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

#ifndef FDIN_SYNTH_H_
#define FDIN_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "absl/status/statusor.h"
#include "fdin/video_data.h"

namespace fdin {

// Synthetic stand-ins for real inpainting: each targets a different artifact
// family (low-pass smoothing, harmonic interpolation, temporal copy).
enum class FillMethod { kBlurFill, kDiffusionFill, kTemporalCopy };

const char* FillMethodName(FillMethod method);
absl::StatusOr<FillMethod> ParseFillMethod(const std::string& name);

struct SynthOptions {
  uint64_t seed = 0;
  int n_clips = 4;
  int frames = 8;
  int height = 64;
  int width = 112;
  FillMethod method = FillMethod::kBlurFill;
  Split split = Split::kTrain;
};

inline constexpr int kMinSynthSide = 16;
inline constexpr double kMinAreaFraction = 0.05;
inline constexpr double kMaxAreaFraction = 0.40;
inline constexpr int kTemporalCopyOffset = 4;
inline constexpr double kDiffusionTolerance = 1e-4;

struct SynthClip {
  std::string clip_id;
  VideoClip original;   // quantized to 8-bit levels
  VideoClip inpainted;  // quantized to 8-bit levels
  MaskSequence masks;   // exactly the pixels where the two differ
};

absl::Status ValidateSynthOptions(const SynthOptions& options);

// Deterministic in (options.seed, clip_index).
absl::StatusOr<SynthClip> SynthesizeClip(const SynthOptions& options,
                                         int clip_index);

// Writes <out_dir>/<clip_id>/{frames,masks}/ and <out_dir>/manifest.tsv.
// Output bytes depend only on `options`.
absl::StatusOr<DatasetManifest> SynthGenerate(
    const SynthOptions& options, const std::filesystem::path& out_dir);

}  // namespace fdin

#endif  // FDIN_SYNTH_H_
