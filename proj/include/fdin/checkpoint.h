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

#ifndef FDIN_CHECKPOINT_H_
#define FDIN_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "fdin/model.h"

namespace fdin {

// 64-bit FNV-1a.
uint64_t Fnv1a64(std::string_view bytes);

// Digest of the canonical model-config JSON.
uint64_t ModelConfigDigest(const ModelConfig& config);

// File layout (little-endian):
//   "FDINCKPT" | u32 version | u64 config digest | i32 height | i32 width |
//   u64 step | u32 json length | model-config JSON |
//   u32 blob count | blobs
// Each blob: u32 name length | name | u32 rank | i64 dims[rank] | f32 data.
// Blobs cover every learnable parameter and normalization buffer.
inline constexpr uint32_t kCheckpointVersion = 1;

struct CheckpointHeader {
  uint32_t version = 0;
  uint64_t config_digest = 0;
  int height = 0;
  int width = 0;
  uint64_t step = 0;
  ModelConfig model;
};

// Writes atomically (temp file + rename).
absl::Status SaveCheckpoint(const std::filesystem::path& path,
                            FdinModel<float>& model, uint64_t step);

absl::StatusOr<CheckpointHeader> ReadCheckpointHeader(
    const std::filesystem::path& path);

// Rebuilds the model from the embedded config and restores every blob.
absl::StatusOr<std::unique_ptr<FdinModel<float>>> LoadCheckpoint(
    const std::filesystem::path& path);

// Copies blobs whose name and shape match into an existing model, for
// externally produced weights. Returns the number of tensors copied.
absl::StatusOr<int> LoadMatchingWeights(const std::filesystem::path& path,
                                        FdinModel<float>* model);

}  // namespace fdin

#endif  // FDIN_CHECKPOINT_H_
