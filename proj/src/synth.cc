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

#include "fdin/synth.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace fdin {
namespace fs = std::filesystem;
namespace {

constexpr int kMaxRejections = 100;

// (3, H, W) working image in doubles.
struct RgbImage {
  int h = 0, w = 0;
  std::vector<double> v;

  RgbImage(int h_, int w_) : h(h_), w(w_), v(3 * h_ * w_, 0.0) {}
  double& at(int c, int y, int x) { return v[(c * h + y) * w + x]; }
  double at(int c, int y, int x) const { return v[(c * h + y) * w + x]; }
};

struct Geometry {
  double cy0, cx0, vy, vx, ry, rx;
};

std::vector<uint8_t> RasterizeEllipse(const Geometry& g, int t, int h, int w) {
  std::vector<uint8_t> m(h * w, 0);
  const double cy = g.cy0 + g.vy * t, cx = g.cx0 + g.vx * t;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double dy = (y - cy) / g.ry, dx = (x - cx) / g.rx;
      m[y * w + x] = dy * dy + dx * dx <= 1.0 ? 1 : 0;
    }
  }
  return m;
}

// Samples shape geometry such that every frame keeps the shape inside the
// frame with an area fraction inside [kMinAreaFraction, kMaxAreaFraction].
absl::StatusOr<Geometry> SampleGeometry(Rng& rng, int frames, int h, int w) {
  for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
    Geometry g;
    const double frac = Uniform(rng, 0.08, 0.30);
    const double aspect = Uniform(rng, 0.6, 1.6);
    g.ry = std::sqrt(frac * h * w / (std::numbers::pi * aspect));
    g.rx = aspect * g.ry;
    const double vmax =
        std::min(1.5, 0.3 * std::min(h, w) / std::max(frames - 1, 1));
    g.vy = Uniform(rng, -vmax, vmax);
    g.vx = Uniform(rng, -vmax, vmax);
    g.cy0 = Uniform(rng, 0, h - 1);
    g.cx0 = Uniform(rng, 0, w - 1);
    bool ok = true;
    for (int t = 0; t < frames && ok; ++t) {
      const double cy = g.cy0 + g.vy * t, cx = g.cx0 + g.vx * t;
      ok = cy - g.ry >= 1 && cy + g.ry <= h - 2 && cx - g.rx >= 1 &&
           cx + g.rx <= w - 2;
      if (!ok) break;
      const auto m = RasterizeEllipse(g, t, h, w);
      int64_t area = 0;
      for (uint8_t v : m) area += v;
      const double f = double(area) / (h * w);
      ok = f >= kMinAreaFraction && f <= kMaxAreaFraction;
    }
    if (ok) return g;
  }
  return absl::FailedPreconditionError(
      absl::StrCat("degenerate geometry: no valid shape for ", h, "x", w,
                   " after ", kMaxRejections, " rejections"));
}

// Gratings plus fixed per-pixel grain; enough high-frequency energy that
// smoothing fills are visible in the spectrum.
RgbImage MakeTexture(Rng& rng, int h, int w, double grain) {
  RgbImage img(h, w);
  for (int c = 0; c < 3; ++c) {
    const double base = Uniform(rng, 0.25, 0.75);
    struct Grating {
      double amp, fy, fx, phase;
    };
    std::vector<Grating> gratings(4);
    for (auto& g : gratings) {
      const double freq = Uniform(rng, 0.1, 0.9);
      const double theta = Uniform(rng, 0, std::numbers::pi);
      g = {Uniform(rng, 0.03, 0.10), freq * std::sin(theta),
           freq * std::cos(theta), Uniform(rng, 0, 2 * std::numbers::pi)};
    }
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double v = base;
        for (const auto& g : gratings) {
          v += g.amp * std::sin(g.fy * y + g.fx * x + g.phase);
        }
        v += Uniform(rng, -grain, grain);
        img.at(c, y, x) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return img;
}

std::vector<double> GaussianKernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

// Separable blur of a single (h, w) plane with zero padding.
std::vector<double> BlurPlane(const std::vector<double>& in, int h, int w,
                              const std::vector<double>& k) {
  const int r = static_cast<int>(k.size()) / 2;
  std::vector<double> tmp(h * w, 0.0), out(h * w, 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0;
      for (int i = -r; i <= r; ++i) {
        const int xx = x + i;
        if (xx >= 0 && xx < w) s += k[i + r] * in[y * w + xx];
      }
      tmp[y * w + x] = s;
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double s = 0;
      for (int i = -r; i <= r; ++i) {
        const int yy = y + i;
        if (yy >= 0 && yy < h) s += k[i + r] * tmp[yy * w + x];
      }
      out[y * w + x] = s;
    }
  }
  return out;
}

// Normalized Gaussian convolution of the known (unmasked) pixels.
void BlurFill(RgbImage& img, const std::vector<uint8_t>& region, double sigma) {
  const int h = img.h, w = img.w;
  const auto k = GaussianKernel(sigma);
  std::vector<double> known(h * w);
  for (int i = 0; i < h * w; ++i) known[i] = region[i] ? 0.0 : 1.0;
  const auto weight = BlurPlane(known, h, w, k);
  for (int c = 0; c < 3; ++c) {
    std::vector<double> masked(h * w);
    for (int i = 0; i < h * w; ++i) masked[i] = known[i] * img.v[c * h * w + i];
    const auto num = BlurPlane(masked, h, w, k);
    for (int i = 0; i < h * w; ++i) {
      if (region[i]) img.v[c * h * w + i] = num[i] / std::max(weight[i], 1e-12);
    }
  }
}

// Over-relaxed Gauss-Seidel neighbor averaging inside the region until the
// largest update falls below kDiffusionTolerance.
void DiffusionFill(RgbImage& img, const std::vector<uint8_t>& region) {
  const int h = img.h, w = img.w;
  constexpr double kOmega = 1.8;
  constexpr int kMaxIterations = 20000;
  for (int c = 0; c < 3; ++c) {
    double* p = img.v.data() + c * h * w;
    double ring_sum = 0;
    int ring_n = 0;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (region[y * w + x]) continue;
        const bool touches = (y > 0 && region[(y - 1) * w + x]) ||
                             (y < h - 1 && region[(y + 1) * w + x]) ||
                             (x > 0 && region[y * w + x - 1]) ||
                             (x < w - 1 && region[y * w + x + 1]);
        if (touches) {
          ring_sum += p[y * w + x];
          ++ring_n;
        }
      }
    }
    const double init = ring_n > 0 ? ring_sum / ring_n : 0.5;
    for (int i = 0; i < h * w; ++i) {
      if (region[i]) p[i] = init;
    }
    for (int it = 0; it < kMaxIterations; ++it) {
      double max_delta = 0;
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          if (!region[y * w + x]) continue;
          double s = 0;
          int n = 0;
          if (y > 0) {
            s += p[(y - 1) * w + x];
            ++n;
          }
          if (y < h - 1) {
            s += p[(y + 1) * w + x];
            ++n;
          }
          if (x > 0) {
            s += p[y * w + x - 1];
            ++n;
          }
          if (x < w - 1) {
            s += p[y * w + x + 1];
            ++n;
          }
          const double target = s / n;
          const double delta = kOmega * (target - p[y * w + x]);
          p[y * w + x] += delta;
          max_delta = std::max(max_delta, std::abs(delta));
        }
      }
      if (max_delta < kDiffusionTolerance) break;
    }
  }
}

uint8_t Quantize(double v) {
  return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

Frame ToFrame(const std::vector<uint8_t>& rgb, int h, int w) {
  Frame f{Tensor<float>({3, h, w})};
  for (int i = 0; i < 3 * h * w; ++i) f.pixels[i] = rgb[i] / 255.0f;
  return f;
}

}  // namespace

const char* FillMethodName(FillMethod method) {
  switch (method) {
    case FillMethod::kBlurFill:
      return "blur_fill";
    case FillMethod::kDiffusionFill:
      return "diffusion_fill";
    case FillMethod::kTemporalCopy:
      return "temporal_copy";
  }
  return "blur_fill";
}

absl::StatusOr<FillMethod> ParseFillMethod(const std::string& name) {
  if (name == "blur_fill") return FillMethod::kBlurFill;
  if (name == "diffusion_fill") return FillMethod::kDiffusionFill;
  if (name == "temporal_copy") return FillMethod::kTemporalCopy;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown fill method '", name,
                   "' (valid: blur_fill, diffusion_fill, temporal_copy)"));
}

absl::Status ValidateSynthOptions(const SynthOptions& o) {
  if (o.n_clips < 1) return absl::InvalidArgumentError("n_clips must be >= 1");
  if (o.frames < 1) return absl::InvalidArgumentError("frames must be >= 1");
  if (o.height < kMinSynthSide || o.width < kMinSynthSide) {
    return absl::InvalidArgumentError(
        absl::StrCat("height and width must be >= ", kMinSynthSide, " (got ",
                     o.height, "x", o.width, ")"));
  }
  return absl::OkStatus();
}

absl::StatusOr<SynthClip> SynthesizeClip(const SynthOptions& o,
                                         int clip_index) {
  FDIN_RETURN_IF_ERROR(ValidateSynthOptions(o));
  std::seed_seq seq{static_cast<uint32_t>(o.seed),
                    static_cast<uint32_t>(o.seed >> 32),
                    static_cast<uint32_t>(clip_index)};
  Rng rng(seq);
  const int h = o.height, w = o.width, frames = o.frames;

  FDIN_ASSIGN_OR_RETURN(Geometry geom, SampleGeometry(rng, frames, h, w));
  // Background pans at an integer velocity across a larger canvas.
  const int pan_y = static_cast<int>(UniformInt(rng, -1, 1));
  const int pan_x = static_cast<int>(UniformInt(rng, -1, 1));
  const int canvas_h = h + std::abs(pan_y) * frames;
  const int canvas_w = w + std::abs(pan_x) * frames;
  const RgbImage background = MakeTexture(rng, canvas_h, canvas_w, 0.08);
  const RgbImage object = MakeTexture(rng, h, w, 0.08);

  std::vector<RgbImage> originals;
  std::vector<std::vector<uint8_t>> regions;
  for (int t = 0; t < frames; ++t) {
    RgbImage img(h, w);
    const int oy = pan_y >= 0 ? pan_y * t : -pan_y * (frames - t);
    const int ox = pan_x >= 0 ? pan_x * t : -pan_x * (frames - t);
    const auto region = RasterizeEllipse(geom, t, h, w);
    for (int c = 0; c < 3; ++c) {
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          img.at(c, y, x) = region[y * w + x]
                                ? object.at(c, y, x)
                                : background.at(c, y + oy, x + ox);
        }
      }
    }
    // Work with 8-bit-representable originals from here on.
    for (double& v : img.v) v = Quantize(v) / 255.0;
    originals.push_back(std::move(img));
    regions.push_back(region);
  }

  SynthClip out;
  out.clip_id = absl::StrFormat("clip_%04d", clip_index);
  out.masks.masks = Tensor<uint8_t>({frames, h, w});
  for (int t = 0; t < frames; ++t) {
    RgbImage filled = originals[t];
    const auto& region = regions[t];
    int source = t >= kTemporalCopyOffset ? t - kTemporalCopyOffset
                                          : t + kTemporalCopyOffset;
    source = std::min(source, frames - 1);
    FillMethod method = o.method;
    if (method == FillMethod::kTemporalCopy && source == t) {
      method = FillMethod::kBlurFill;
    }
    switch (method) {
      case FillMethod::kBlurFill: {
        const double sigma = 0.5 * std::min(geom.ry, geom.rx) + 2.0;
        BlurFill(filled, region, sigma);
        break;
      }
      case FillMethod::kDiffusionFill:
        DiffusionFill(filled, region);
        break;
      case FillMethod::kTemporalCopy:
        for (int c = 0; c < 3; ++c) {
          for (int i = 0; i < h * w; ++i) {
            if (region[i])
              filled.v[c * h * w + i] = originals[source].v[c * h * w + i];
          }
        }
        break;
    }

    std::vector<uint8_t> orig8(3 * h * w), fill8(3 * h * w);
    for (int i = 0; i < 3 * h * w; ++i) {
      orig8[i] = Quantize(originals[t].v[i]);
      fill8[i] = Quantize(filled.v[i]);
    }
    // Every region pixel must differ from the original in some channel so
    // the mask equals the set of modified pixels.
    for (int i = 0; i < h * w; ++i) {
      if (!region[i]) {
        for (int c = 0; c < 3; ++c) fill8[c * h * w + i] = orig8[c * h * w + i];
        continue;
      }
      bool same = true;
      for (int c = 0; c < 3; ++c)
        same &= fill8[c * h * w + i] == orig8[c * h * w + i];
      if (same) {
        uint8_t& v = fill8[i];
        v = v < 255 ? v + 1 : v - 1;
      }
      out.masks.masks[int64_t(t) * h * w + i] = 1;
    }
    out.original.frames.push_back(ToFrame(orig8, h, w));
    out.inpainted.frames.push_back(ToFrame(fill8, h, w));
  }
  return out;
}

absl::StatusOr<DatasetManifest> SynthGenerate(const SynthOptions& o,
                                              const fs::path& out_dir) {
  FDIN_RETURN_IF_ERROR(ValidateSynthOptions(o));
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create output directory ", out_dir.string(), ": ",
                     ec.message()));
  }
  DatasetManifest manifest;
  for (int i = 0; i < o.n_clips; ++i) {
    FDIN_ASSIGN_OR_RETURN(SynthClip clip, SynthesizeClip(o, i));
    const fs::path clip_dir = out_dir / clip.clip_id;
    const fs::path frame_dir = clip_dir / "frames";
    const fs::path mask_dir = clip_dir / "masks";
    fs::create_directories(frame_dir, ec);
    fs::create_directories(mask_dir, ec);
    if (ec) {
      return absl::PermissionDeniedError(absl::StrCat(
          "cannot create ", clip_dir.string(), ": ", ec.message()));
    }
    for (int t = 0; t < o.frames; ++t) {
      FDIN_RETURN_IF_ERROR(
          WritePng(frame_dir / absl::StrFormat("frame_%05d.png", t),
                   FrameToImage(clip.inpainted.frames[t])));
      FDIN_RETURN_IF_ERROR(
          WritePng(mask_dir / absl::StrFormat("mask_%05d.png", t),
                   MaskToImage(clip.masks.masks, t)));
    }
    manifest.records.push_back({clip.clip_id, fs::absolute(frame_dir),
                                fs::absolute(mask_dir), o.frames, o.split});
  }
  FDIN_RETURN_IF_ERROR(WriteManifest(manifest, out_dir / "manifest.tsv"));
  return manifest;
}

}  // namespace fdin
