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

#ifndef FDIN_IMAGE_IO_H_
#define FDIN_IMAGE_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace fdin {

// 8-bit interleaved image, 1 (gray) or 3 (RGB) channels.
struct Image8 {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<uint8_t> pixels;
};

// Decodes PNG or JPEG (sniffed from the signature) into `channels` (1 or 3)
// channels, converting color type as needed.
absl::StatusOr<Image8> ReadImage(const std::filesystem::path& path,
                                 int channels);
absl::Status WritePng(const std::filesystem::path& path, const Image8& image);

absl::StatusOr<std::vector<uint8_t>> EncodeJpeg(const Image8& image,
                                                int quality);
absl::StatusOr<Image8> DecodeJpeg(std::span<const uint8_t> bytes, int channels);

}  // namespace fdin

#endif  // FDIN_IMAGE_IO_H_
