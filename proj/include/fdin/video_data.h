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

#ifndef FDIN_VIDEO_DATA_H_
#define FDIN_VIDEO_DATA_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "fdin/image_io.h"
#include "fdin/rng.h"
#include "fdin/tensor.h"

namespace fdin {

// One RGB frame, (3, H, W) with values in [0, 1].
struct Frame {
  Tensor<float> pixels;

  int64_t height() const { return pixels.dim(1); }
  int64_t width() const { return pixels.dim(2); }
};

struct VideoClip {
  std::vector<Frame> frames;
  std::optional<double> fps;

  int64_t length() const { return static_cast<int64_t>(frames.size()); }
  int64_t height() const { return frames.empty() ? 0 : frames[0].height(); }
  int64_t width() const { return frames.empty() ? 0 : frames[0].width(); }
};

// Binary (T, H, W) masks; 1 marks an inpainted pixel.
struct MaskSequence {
  Tensor<uint8_t> masks;

  int64_t length() const { return masks.empty() ? 0 : masks.dim(0); }
};

struct LabeledClip {
  std::string clip_id;
  VideoClip clip;
  MaskSequence masks;
};

// T_C consecutive frames of one clip: frames (T_C, 3, H, W), masks
// (T_C, H, W).
struct ClipWindow {
  Tensor<float> frames;
  Tensor<uint8_t> masks;
  std::string source_clip_id;
  int64_t start_index = 0;
};

enum class Split { kTrain, kVal, kTest };

const char* SplitName(Split split);
absl::StatusOr<Split> ParseSplit(const std::string& name);

struct ManifestRecord {
  std::string clip_id;
  std::filesystem::path frame_dir;
  std::filesystem::path mask_dir;
  int64_t frame_count = 0;
  Split split = Split::kTrain;
};

struct DatasetManifest {
  std::vector<ManifestRecord> records;
};

// Tab-separated, one clip per line: clip_id, frame_dir, mask_dir,
// frame_count, split. Relative directories resolve against the manifest's
// own directory.
absl::StatusOr<DatasetManifest> ReadManifest(const std::filesystem::path& path);
absl::Status WriteManifest(const DatasetManifest& manifest,
                           const std::filesystem::path& path);

// Mask pixels > 127 load as 1, all others as 0.
constexpr uint8_t kMaskThreshold = 127;

absl::StatusOr<LabeledClip> LoadClip(const std::filesystem::path& frame_dir,
                                     const std::filesystem::path& mask_dir);

// Loads every record, at most `workers` clips at a time (0 = NumThreads()).
// Output order follows the manifest regardless of worker count.
absl::StatusOr<std::vector<LabeledClip>> LoadDataset(
    const DatasetManifest& manifest, int workers = 0);

// Windows start at 0, stride, 2*stride, ... while start + t_c <= T.
absl::StatusOr<std::vector<ClipWindow>> SlidingWindows(const LabeledClip& clip,
                                                       int64_t t_c,
                                                       int64_t stride);

// Window starts covering every frame: stride t_c, plus one window anchored
// at T - t_c when T is not a multiple of t_c.
absl::StatusOr<std::vector<int64_t>> CoverageStarts(int64_t length,
                                                    int64_t t_c);

ClipWindow ExtractWindow(const LabeledClip& clip, int64_t start, int64_t t_c);

// One crop offset and one flip decision, shared by every frame and mask of
// the window.
absl::StatusOr<ClipWindow> Augment(const ClipWindow& window, Rng& rng,
                                   int64_t crop_h, int64_t crop_w,
                                   double flip_prob);
ClipWindow FlipHorizontal(const ClipWindow& window);
absl::StatusOr<ClipWindow> Crop(const ClipWindow& window, int64_t top,
                                int64_t left, int64_t crop_h, int64_t crop_w);

// Independent per-frame JPEG encode/decode at quality `qf` (MJPEG).
absl::StatusOr<VideoClip> RecompressQf(const VideoClip& clip, int qf);

double Psnr(const Frame& a, const Frame& b);

Image8 FrameToImage(const Frame& frame);
Frame FrameFromImage(const Image8& image);
Image8 MaskToImage(const Tensor<uint8_t>& masks, int64_t t);

// Stacks (T, 3, H, W).
Tensor<float> ClipTensor(const VideoClip& clip);

}  // namespace fdin

#endif  // FDIN_VIDEO_DATA_H_
