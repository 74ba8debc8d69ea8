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

#include "fdin/video_data.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <thread>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "fdin/blas.h"

namespace fdin {
namespace fs = std::filesystem;
namespace {

bool IsImageFile(const fs::path& p) {
  const std::string ext = absl::AsciiStrToLower(p.extension().string());
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

absl::StatusOr<std::vector<fs::path>> ListImages(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    return absl::NotFoundError(
        absl::StrCat("missing directory: ", dir.string()));
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && IsImageFile(entry.path())) {
      files.push_back(entry.path());
    }
  }
  if (ec) {
    return absl::InternalError(
        absl::StrCat("cannot list ", dir.string(), ": ", ec.message()));
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) {
              return a.filename().string() < b.filename().string();
            });
  return files;
}

}  // namespace

const char* SplitName(Split split) {
  switch (split) {
    case Split::kTrain:
      return "train";
    case Split::kVal:
      return "val";
    case Split::kTest:
      return "test";
  }
  return "train";
}

absl::StatusOr<Split> ParseSplit(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown split '", name, "' (expected train, val, test)"));
}

absl::StatusOr<DatasetManifest> ReadManifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::NotFoundError(
        absl::StrCat("cannot open manifest ", path.string()));
  }
  const fs::path base = path.parent_path();
  DatasetManifest manifest;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields = absl::StrSplit(line, '\t');
    if (fields.size() != 5) {
      return absl::InvalidArgumentError(absl::StrCat(
          path.string(), ":", line_no,
          ": expected 5 tab-separated fields, got ", fields.size()));
    }
    ManifestRecord rec;
    rec.clip_id = fields[0];
    rec.frame_dir = fs::path(fields[1]).is_absolute() ? fs::path(fields[1])
                                                      : base / fields[1];
    rec.mask_dir = fs::path(fields[2]).is_absolute() ? fs::path(fields[2])
                                                     : base / fields[2];
    if (!absl::SimpleAtoi(fields[3], &rec.frame_count) || rec.frame_count < 1) {
      return absl::InvalidArgumentError(absl::StrCat(
          path.string(), ":", line_no, ": bad frame_count '", fields[3], "'"));
    }
    auto split = ParseSplit(fields[4]);
    if (!split.ok()) {
      return absl::InvalidArgumentError(absl::StrCat(
          path.string(), ":", line_no, ": ", split.status().message()));
    }
    rec.split = *split;
    manifest.records.push_back(std::move(rec));
  }
  return manifest;
}

absl::Status WriteManifest(const DatasetManifest& manifest,
                           const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot write manifest ", path.string()));
  }
  const fs::path base = fs::absolute(path).parent_path();
  for (const ManifestRecord& rec : manifest.records) {
    auto rel = [&](const fs::path& p) {
      return p.is_absolute() ? p.lexically_relative(base).generic_string()
                             : p.generic_string();
    };
    out << rec.clip_id << '\t' << rel(rec.frame_dir) << '\t'
        << rel(rec.mask_dir) << '\t' << rec.frame_count << '\t'
        << SplitName(rec.split) << '\n';
  }
  if (!out) {
    return absl::InternalError(absl::StrCat("write failed: ", path.string()));
  }
  return absl::OkStatus();
}

Frame FrameFromImage(const Image8& image) {
  Frame f{Tensor<float>({3, image.height, image.width})};
  const int64_t plane = int64_t(image.height) * image.width;
  for (int64_t i = 0; i < plane; ++i) {
    for (int c = 0; c < 3; ++c) {
      const uint8_t v =
          image.pixels[i * image.channels + (image.channels == 3 ? c : 0)];
      f.pixels[c * plane + i] = v / 255.0f;
    }
  }
  return f;
}

Image8 FrameToImage(const Frame& frame) {
  Image8 img;
  img.height = static_cast<int>(frame.height());
  img.width = static_cast<int>(frame.width());
  img.channels = 3;
  const int64_t plane = int64_t(img.height) * img.width;
  img.pixels.resize(plane * 3);
  for (int64_t i = 0; i < plane; ++i) {
    for (int c = 0; c < 3; ++c) {
      const float v = std::clamp(frame.pixels[c * plane + i], 0.0f, 1.0f);
      img.pixels[i * 3 + c] = static_cast<uint8_t>(std::lround(v * 255.0f));
    }
  }
  return img;
}

Image8 MaskToImage(const Tensor<uint8_t>& masks, int64_t t) {
  Image8 img;
  img.height = static_cast<int>(masks.dim(1));
  img.width = static_cast<int>(masks.dim(2));
  img.channels = 1;
  const int64_t plane = int64_t(img.height) * img.width;
  img.pixels.resize(plane);
  for (int64_t i = 0; i < plane; ++i) {
    img.pixels[i] = masks[t * plane + i] ? 255 : 0;
  }
  return img;
}

absl::StatusOr<LabeledClip> LoadClip(const fs::path& frame_dir,
                                     const fs::path& mask_dir) {
  FDIN_ASSIGN_OR_RETURN(std::vector<fs::path> frame_files,
                        ListImages(frame_dir));
  FDIN_ASSIGN_OR_RETURN(std::vector<fs::path> mask_files, ListImages(mask_dir));
  if (frame_files.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("no frame images in ", frame_dir.string()));
  }
  if (frame_files.size() != mask_files.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("frame/mask count mismatch: ", frame_files.size(),
                     " frames in ", frame_dir.string(), " vs ",
                     mask_files.size(), " masks in ", mask_dir.string()));
  }
  LabeledClip out;
  out.clip_id = frame_dir.parent_path().filename().string();
  int64_t h = 0, w = 0;
  const int64_t t_len = static_cast<int64_t>(frame_files.size());
  for (int64_t t = 0; t < t_len; ++t) {
    FDIN_ASSIGN_OR_RETURN(Image8 img, ReadImage(frame_files[t], 3));
    if (t == 0) {
      h = img.height;
      w = img.width;
      out.masks.masks = Tensor<uint8_t>({t_len, h, w});
    } else if (img.height != h || img.width != w) {
      return absl::InvalidArgumentError(
          absl::StrCat("resolution mismatch: ", frame_files[t].string(), " is ",
                       img.width, "x", img.height, ", expected ", w, "x", h));
    }
    out.clip.frames.push_back(FrameFromImage(img));

    FDIN_ASSIGN_OR_RETURN(Image8 mask, ReadImage(mask_files[t], 1));
    if (mask.height != h || mask.width != w) {
      return absl::InvalidArgumentError(
          absl::StrCat("resolution mismatch: ", mask_files[t].string(), " is ",
                       mask.width, "x", mask.height, ", expected ", w, "x", h));
    }
    uint8_t* dst = out.masks.masks.data() + t * h * w;
    for (int64_t i = 0; i < h * w; ++i) {
      dst[i] = mask.pixels[i] > kMaskThreshold ? 1 : 0;
    }
  }
  return out;
}

absl::StatusOr<std::vector<LabeledClip>> LoadDataset(
    const DatasetManifest& manifest, int workers) {
  const size_t n = manifest.records.size();
  if (n == 0) return absl::InvalidArgumentError("manifest has no clips");
  if (workers <= 0) workers = NumThreads();
  workers = std::max(1, std::min<int>(workers, static_cast<int>(n)));

  std::vector<absl::StatusOr<LabeledClip>> results(
      n, absl::UnknownError("not loaded"));
  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (size_t i = next++; i < n; i = next++) {
      const ManifestRecord& rec = manifest.records[i];
      auto clip = LoadClip(rec.frame_dir, rec.mask_dir);
      if (clip.ok()) {
        clip->clip_id = rec.clip_id;
        if (clip->clip.length() != rec.frame_count) {
          clip = absl::InvalidArgumentError(
              absl::StrCat("clip ", rec.clip_id, ": manifest frame_count ",
                           rec.frame_count, " but ", clip->clip.length(),
                           " frames in ", rec.frame_dir.string()));
        }
      }
      results[i] = std::move(clip);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  std::vector<LabeledClip> clips;
  clips.reserve(n);
  for (auto& r : results) {
    if (!r.ok()) return r.status();
    clips.push_back(std::move(r).value());
  }
  return clips;
}

ClipWindow ExtractWindow(const LabeledClip& clip, int64_t start, int64_t t_c) {
  const int64_t h = clip.clip.height(), w = clip.clip.width();
  const int64_t frame_size = 3 * h * w;
  ClipWindow win;
  win.frames = Tensor<float>({t_c, 3, h, w});
  win.masks = Tensor<uint8_t>({t_c, h, w});
  win.source_clip_id = clip.clip_id;
  win.start_index = start;
  for (int64_t t = 0; t < t_c; ++t) {
    std::memcpy(win.frames.data() + t * frame_size,
                clip.clip.frames[start + t].pixels.data(),
                frame_size * sizeof(float));
  }
  std::memcpy(win.masks.data(), clip.masks.masks.data() + start * h * w,
              t_c * h * w);
  return win;
}

absl::StatusOr<std::vector<ClipWindow>> SlidingWindows(const LabeledClip& clip,
                                                       int64_t t_c,
                                                       int64_t stride) {
  if (t_c < 1 || stride < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "t_c and stride must be >= 1 (t_c=", t_c, ", stride=", stride, ")"));
  }
  const int64_t len = clip.clip.length();
  if (len < t_c) {
    return absl::InvalidArgumentError(
        absl::StrCat("clip shorter than window: clip ", clip.clip_id, " has ",
                     len, " frames, t_c=", t_c));
  }
  std::vector<ClipWindow> windows;
  for (int64_t start = 0; start + t_c <= len; start += stride) {
    windows.push_back(ExtractWindow(clip, start, t_c));
  }
  return windows;
}

absl::StatusOr<std::vector<int64_t>> CoverageStarts(int64_t length,
                                                    int64_t t_c) {
  if (t_c < 1) return absl::InvalidArgumentError("t_c must be >= 1");
  if (length < t_c) {
    return absl::InvalidArgumentError(absl::StrCat(
        "clip shorter than window: ", length, " frames, t_c=", t_c));
  }
  std::vector<int64_t> starts;
  for (int64_t s = 0; s + t_c <= length; s += t_c) starts.push_back(s);
  if (starts.back() + t_c < length) starts.push_back(length - t_c);
  return starts;
}

ClipWindow FlipHorizontal(const ClipWindow& window) {
  ClipWindow out = window;
  const int64_t w = window.frames.dim(3);
  const int64_t rows = window.frames.size() / w;
  for (int64_t r = 0; r < rows; ++r) {
    float* row = out.frames.data() + r * w;
    std::reverse(row, row + w);
  }
  const int64_t mask_rows = window.masks.size() / w;
  for (int64_t r = 0; r < mask_rows; ++r) {
    uint8_t* row = out.masks.data() + r * w;
    std::reverse(row, row + w);
  }
  return out;
}

absl::StatusOr<ClipWindow> Crop(const ClipWindow& window, int64_t top,
                                int64_t left, int64_t crop_h, int64_t crop_w) {
  const int64_t t_c = window.frames.dim(0);
  const int64_t h = window.frames.dim(2), w = window.frames.dim(3);
  if (crop_h < 1 || crop_w < 1 || top < 0 || left < 0 || top + crop_h > h ||
      left + crop_w > w) {
    return absl::InvalidArgumentError(
        absl::StrCat("crop ", crop_h, "x", crop_w, " at (", top, ",", left,
                     ") does not fit frame ", h, "x", w));
  }
  ClipWindow out;
  out.source_clip_id = window.source_clip_id;
  out.start_index = window.start_index;
  out.frames = Tensor<float>({t_c, 3, crop_h, crop_w});
  out.masks = Tensor<uint8_t>({t_c, crop_h, crop_w});
  for (int64_t t = 0; t < t_c; ++t) {
    for (int64_t c = 0; c < 3; ++c) {
      for (int64_t y = 0; y < crop_h; ++y) {
        std::memcpy(&out.frames(t, c, y, 0),
                    &window.frames(t, c, top + y, left),
                    crop_w * sizeof(float));
      }
    }
    for (int64_t y = 0; y < crop_h; ++y) {
      std::memcpy(&out.masks(t, y, 0), &window.masks(t, top + y, left), crop_w);
    }
  }
  return out;
}

absl::StatusOr<ClipWindow> Augment(const ClipWindow& window, Rng& rng,
                                   int64_t crop_h, int64_t crop_w,
                                   double flip_prob) {
  const int64_t h = window.frames.dim(2), w = window.frames.dim(3);
  if (crop_h > h || crop_w > w || crop_h < 1 || crop_w < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "crop ", crop_h, "x", crop_w, " larger than frame ", h, "x", w));
  }
  const int64_t top = UniformInt(rng, 0, h - crop_h);
  const int64_t left = UniformInt(rng, 0, w - crop_w);
  const bool flip = Bernoulli(rng, flip_prob);
  FDIN_ASSIGN_OR_RETURN(ClipWindow out,
                        Crop(window, top, left, crop_h, crop_w));
  if (flip) out = FlipHorizontal(out);
  return out;
}

absl::StatusOr<VideoClip> RecompressQf(const VideoClip& clip, int qf) {
  if (qf < 1 || qf > 100) {
    return absl::InvalidArgumentError(
        absl::StrCat("quality factor must be in [1,100], got ", qf));
  }
  VideoClip out;
  out.fps = clip.fps;
  out.frames.reserve(clip.frames.size());
  for (size_t t = 0; t < clip.frames.size(); ++t) {
    auto bytes = EncodeJpeg(FrameToImage(clip.frames[t]), qf);
    if (!bytes.ok()) {
      return absl::InternalError(
          absl::StrCat("frame ", t, ": ", bytes.status().message()));
    }
    auto decoded = DecodeJpeg(*bytes, 3);
    if (!decoded.ok()) {
      return absl::InternalError(
          absl::StrCat("frame ", t, ": ", decoded.status().message()));
    }
    out.frames.push_back(FrameFromImage(*decoded));
  }
  return out;
}

double Psnr(const Frame& a, const Frame& b) {
  FDIN_CHECK(a.pixels.SameShape(b.pixels));
  double se = 0;
  for (int64_t i = 0; i < a.pixels.size(); ++i) {
    const double d = double(a.pixels[i]) - double(b.pixels[i]);
    se += d * d;
  }
  const double mse = se / a.pixels.size();
  if (mse == 0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

Tensor<float> ClipTensor(const VideoClip& clip) {
  const int64_t t_len = clip.length(), h = clip.height(), w = clip.width();
  Tensor<float> out({t_len, 3, h, w});
  for (int64_t t = 0; t < t_len; ++t) {
    std::memcpy(out.data() + t * 3 * h * w, clip.frames[t].pixels.data(),
                3 * h * w * sizeof(float));
  }
  return out;
}

}  // namespace fdin
