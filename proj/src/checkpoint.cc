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

#include "fdin/checkpoint.h"

#include <cstring>
#include <fstream>
#include <map>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace fdin {
namespace {

constexpr char kMagic[8] = {'F', 'D', 'I', 'N', 'C', 'K', 'P', 'T'};
constexpr uint32_t kMaxNameLength = 4096;
constexpr uint32_t kMaxRank = 8;

template <typename U>
void Put(std::string* out, U value) {
  char bytes[sizeof(U)];
  std::memcpy(bytes, &value, sizeof(U));
  out->append(bytes, sizeof(U));
}

// Bounds-checked cursor over a loaded file.
class Reader {
 public:
  Reader(const std::string& data, std::string path)
      : data_(data), path_(std::move(path)) {}

  template <typename U>
  absl::StatusOr<U> Get() {
    if (pos_ + sizeof(U) > data_.size()) return Truncated();
    U value;
    std::memcpy(&value, data_.data() + pos_, sizeof(U));
    pos_ += sizeof(U);
    return value;
  }

  absl::StatusOr<std::string> Bytes(size_t n) {
    if (pos_ + n > data_.size()) return Truncated();
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  absl::Status Floats(float* dst, int64_t n) {
    const size_t bytes = size_t(n) * sizeof(float);
    if (pos_ + bytes > data_.size()) return Truncated();
    std::memcpy(dst, data_.data() + pos_, bytes);
    pos_ += bytes;
    return absl::OkStatus();
  }

  bool AtEnd() const { return pos_ == data_.size(); }

 private:
  absl::Status Truncated() const {
    return absl::DataLossError(
        absl::StrCat("checkpoint ", path_, " is truncated at byte ", pos_));
  }

  const std::string& data_;
  std::string path_;
  size_t pos_ = 0;
};

absl::StatusOr<std::string> Slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open checkpoint ", path.string()));
  }
  return std::string(std::istreambuf_iterator<char>(in), {});
}

absl::StatusOr<CheckpointHeader> ParseHeader(Reader& r,
                                             const std::string& path) {
  FDIN_ASSIGN_OR_RETURN(std::string magic, r.Bytes(sizeof(kMagic)));
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, " is not an FDIN checkpoint"));
  }
  CheckpointHeader h;
  FDIN_ASSIGN_OR_RETURN(h.version, r.Get<uint32_t>());
  if (h.version != kCheckpointVersion) {
    return absl::FailedPreconditionError(
        absl::StrCat(path, ": unsupported checkpoint version ", h.version,
                     " (expected ", kCheckpointVersion, ")"));
  }
  FDIN_ASSIGN_OR_RETURN(h.config_digest, r.Get<uint64_t>());
  FDIN_ASSIGN_OR_RETURN(h.height, r.Get<int32_t>());
  FDIN_ASSIGN_OR_RETURN(h.width, r.Get<int32_t>());
  FDIN_ASSIGN_OR_RETURN(h.step, r.Get<uint64_t>());
  FDIN_ASSIGN_OR_RETURN(uint32_t json_len, r.Get<uint32_t>());
  FDIN_ASSIGN_OR_RETURN(std::string json, r.Bytes(json_len));
  FDIN_ASSIGN_OR_RETURN(h.model, ModelConfigFromJson(json));
  const uint64_t digest = Fnv1a64(json);
  if (digest != h.config_digest) {
    return absl::DataLossError(absl::StrFormat(
        "%s: config digest mismatch (header %016x, computed %016x)", path,
        h.config_digest, digest));
  }
  if (h.height != h.model.height || h.width != h.model.width) {
    return absl::DataLossError(
        absl::StrCat(path, ": header resolution ", h.height, "x", h.width,
                     " disagrees with the embedded config"));
  }
  return h;
}

struct Blob {
  Shape shape;
  std::vector<float> data;
};

absl::StatusOr<std::map<std::string, Blob>> ParseBlobs(
    Reader& r, const std::string& path) {
  std::map<std::string, Blob> blobs;
  FDIN_ASSIGN_OR_RETURN(uint32_t count, r.Get<uint32_t>());
  for (uint32_t i = 0; i < count; ++i) {
    FDIN_ASSIGN_OR_RETURN(uint32_t name_len, r.Get<uint32_t>());
    if (name_len > kMaxNameLength) {
      return absl::DataLossError(absl::StrCat(path, ": corrupt blob name"));
    }
    FDIN_ASSIGN_OR_RETURN(std::string name, r.Bytes(name_len));
    FDIN_ASSIGN_OR_RETURN(uint32_t rank, r.Get<uint32_t>());
    if (rank > kMaxRank) {
      return absl::DataLossError(
          absl::StrCat(path, ": corrupt rank for blob ", name));
    }
    Blob blob;
    for (uint32_t d = 0; d < rank; ++d) {
      FDIN_ASSIGN_OR_RETURN(int64_t dim, r.Get<int64_t>());
      if (dim < 0) {
        return absl::DataLossError(
            absl::StrCat(path, ": negative dim in blob ", name));
      }
      blob.shape.push_back(dim);
    }
    blob.data.resize(NumElements(blob.shape));
    FDIN_RETURN_IF_ERROR(r.Floats(blob.data.data(), blob.data.size()));
    blobs.emplace(std::move(name), std::move(blob));
  }
  if (!r.AtEnd()) {
    return absl::DataLossError(absl::StrCat(path, ": trailing bytes"));
  }
  return blobs;
}

// Every tensor that a checkpoint stores, in traversal order.
std::vector<std::pair<std::string, Tensor<float>*>> Slots(
    FdinModel<float>& model) {
  std::vector<std::pair<std::string, Tensor<float>*>> slots;
  for (auto& p : model.Parameters().params) {
    slots.emplace_back(p.name, &p.param->value);
  }
  for (auto& b : model.Parameters().buffers) {
    slots.emplace_back(b.name, b.tensor);
  }
  return slots;
}

}  // namespace

uint64_t Fnv1a64(std::string_view bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t ModelConfigDigest(const ModelConfig& config) {
  return Fnv1a64(ModelConfigToJson(config));
}

absl::Status SaveCheckpoint(const std::filesystem::path& path,
                            FdinModel<float>& model, uint64_t step) {
  const std::string json = ModelConfigToJson(model.config());
  std::string out(kMagic, sizeof(kMagic));
  Put<uint32_t>(&out, kCheckpointVersion);
  Put<uint64_t>(&out, Fnv1a64(json));
  Put<int32_t>(&out, model.config().height);
  Put<int32_t>(&out, model.config().width);
  Put<uint64_t>(&out, step);
  Put<uint32_t>(&out, json.size());
  out += json;
  const auto slots = Slots(model);
  Put<uint32_t>(&out, slots.size());
  for (const auto& [name, tensor] : slots) {
    Put<uint32_t>(&out, name.size());
    out += name;
    Put<uint32_t>(&out, tensor->rank());
    for (int64_t d : tensor->shape()) Put<int64_t>(&out, d);
    out.append(reinterpret_cast<const char*>(tensor->data()),
               tensor->size() * sizeof(float));
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) {
      return absl::PermissionDeniedError(
          absl::StrCat("cannot write checkpoint ", tmp.string()));
    }
    f.write(out.data(), out.size());
    if (!f) {
      return absl::DataLossError(absl::StrCat("short write to ", tmp.string()));
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    return absl::InternalError(absl::StrCat("cannot move checkpoint into ",
                                            path.string(), ": ", ec.message()));
  }
  return absl::OkStatus();
}

absl::StatusOr<CheckpointHeader> ReadCheckpointHeader(
    const std::filesystem::path& path) {
  FDIN_ASSIGN_OR_RETURN(std::string data, Slurp(path));
  Reader r(data, path.string());
  return ParseHeader(r, path.string());
}

absl::StatusOr<std::unique_ptr<FdinModel<float>>> LoadCheckpoint(
    const std::filesystem::path& path) {
  FDIN_ASSIGN_OR_RETURN(std::string data, Slurp(path));
  Reader r(data, path.string());
  FDIN_ASSIGN_OR_RETURN(CheckpointHeader header, ParseHeader(r, path.string()));
  FDIN_ASSIGN_OR_RETURN(auto blobs, ParseBlobs(r, path.string()));
  FDIN_ASSIGN_OR_RETURN(auto model, FdinModel<float>::Create(header.model));
  for (const auto& [name, tensor] : Slots(*model)) {
    auto it = blobs.find(name);
    if (it == blobs.end()) {
      return absl::DataLossError(
          absl::StrCat(path.string(), ": missing tensor ", name));
    }
    if (it->second.shape != tensor->shape()) {
      return absl::DataLossError(
          absl::StrCat(path.string(), ": tensor ", name, " has shape ",
                       ShapeString(it->second.shape), ", model expects ",
                       ShapeString(tensor->shape())));
    }
    std::copy(it->second.data.begin(), it->second.data.end(), tensor->data());
  }
  return model;
}

absl::StatusOr<int> LoadMatchingWeights(const std::filesystem::path& path,
                                        FdinModel<float>* model) {
  FDIN_ASSIGN_OR_RETURN(std::string data, Slurp(path));
  Reader r(data, path.string());
  FDIN_RETURN_IF_ERROR(ParseHeader(r, path.string()).status());
  FDIN_ASSIGN_OR_RETURN(auto blobs, ParseBlobs(r, path.string()));
  int copied = 0;
  for (const auto& [name, tensor] : Slots(*model)) {
    auto it = blobs.find(name);
    if (it == blobs.end() || it->second.shape != tensor->shape()) continue;
    std::copy(it->second.data.begin(), it->second.data.end(), tensor->data());
    ++copied;
  }
  return copied;
}

}  // namespace fdin
