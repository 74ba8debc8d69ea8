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
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>

#include "fdin/image_io.h"
#include "fdin/rng.h"
#include "fdin/synth.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace fdin {
namespace {

namespace fs = std::filesystem;

fs::path FreshDir(const std::string& name) {
  fs::path dir = fs::path(::testing::TempDir()) / ("fdin_vd_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

// Clip whose pixel (t, c, y, x) encodes its own coordinates.
LabeledClip CoordinateClip(int64_t t_len, int64_t h, int64_t w) {
  LabeledClip clip;
  clip.clip_id = "coord";
  clip.masks.masks = Tensor<uint8_t>({t_len, h, w});
  for (int64_t t = 0; t < t_len; ++t) {
    Frame f{Tensor<float>({3, h, w})};
    for (int64_t c = 0; c < 3; ++c)
      for (int64_t y = 0; y < h; ++y)
        for (int64_t x = 0; x < w; ++x)
          f.pixels(c, y, x) = float(((t * 3 + c) * h + y) * w + x);
    clip.clip.frames.push_back(std::move(f));
    for (int64_t y = 0; y < h; ++y)
      for (int64_t x = 0; x < w; ++x)
        clip.masks.masks(t, y, x) = uint8_t((x + y + t) % 2);
  }
  return clip;
}

void WriteSolidPng(const fs::path& p, int h, int w, int channels, uint8_t v) {
  Image8 img{w, h, channels, std::vector<uint8_t>(size_t(h) * w * channels, v)};
  ASSERT_TRUE(WritePng(p, img).ok());
}

TEST(ManifestTest, RoundTrip) {
  const fs::path dir = FreshDir("manifest");
  DatasetManifest m;
  m.records.push_back({"a", "/x/a/frames", "/x/a/masks", 12, Split::kTrain});
  m.records.push_back({"b", "/x/b/frames", "/x/b/masks", 9, Split::kTest});
  ASSERT_TRUE(WriteManifest(m, dir / "m.tsv").ok());
  auto back = ReadManifest(dir / "m.tsv");
  ASSERT_TRUE(back.ok()) << back.status();
  ASSERT_EQ(back->records.size(), 2u);
  EXPECT_EQ(back->records[1].clip_id, "b");
  EXPECT_EQ(back->records[1].frame_count, 9);
  EXPECT_EQ(back->records[1].split, Split::kTest);
  EXPECT_EQ(back->records[0].mask_dir.lexically_normal(),
            fs::path("/x/a/masks"));
}

TEST(ManifestTest, MissingFileFails) {
  EXPECT_FALSE(ReadManifest(FreshDir("nomanifest") / "absent.tsv").ok());
}

TEST(LoadClipTest, CountMismatchNamesBothCounts) {
  const fs::path dir = FreshDir("mismatch");
  fs::create_directories(dir / "c" / "frames");
  fs::create_directories(dir / "c" / "masks");
  for (int t = 0; t < 3; ++t) {
    WriteSolidPng(dir / "c" / "frames" / ("f" + std::to_string(t) + ".png"), 4,
                  5, 3, 10);
  }
  for (int t = 0; t < 2; ++t) {
    WriteSolidPng(dir / "c" / "masks" / ("m" + std::to_string(t) + ".png"), 4,
                  5, 1, 0);
  }
  auto clip = LoadClip(dir / "c" / "frames", dir / "c" / "masks");
  ASSERT_FALSE(clip.ok());
  EXPECT_NE(clip.status().message().find("3 frames"), std::string::npos);
  EXPECT_NE(clip.status().message().find("2 masks"), std::string::npos);
}

TEST(LoadClipTest, MaskBinarizedAndPixelsScaled) {
  const fs::path dir = FreshDir("binarize");
  fs::create_directories(dir / "c" / "frames");
  fs::create_directories(dir / "c" / "masks");
  WriteSolidPng(dir / "c" / "frames" / "f0.png", 4, 5, 3, 255);
  WriteSolidPng(dir / "c" / "frames" / "f1.png", 4, 5, 3, 0);
  WriteSolidPng(dir / "c" / "masks" / "m0.png", 4, 5, 1, 255);
  WriteSolidPng(dir / "c" / "masks" / "m1.png", 4, 5, 1, 0);
  auto clip = LoadClip(dir / "c" / "frames", dir / "c" / "masks");
  ASSERT_TRUE(clip.ok()) << clip.status();
  EXPECT_EQ(clip->clip_id, "c");
  EXPECT_EQ(clip->clip.length(), 2);
  EXPECT_EQ(clip->masks.masks(0, 2, 3), 1);
  EXPECT_EQ(clip->masks.masks(1, 2, 3), 0);
  EXPECT_FLOAT_EQ(clip->clip.frames[0].pixels(1, 0, 0), 1.0f);
  EXPECT_FLOAT_EQ(clip->clip.frames[1].pixels(1, 0, 0), 0.0f);
}

TEST(LoadClipTest, ResolutionMismatchRejected) {
  const fs::path dir = FreshDir("res");
  fs::create_directories(dir / "c" / "frames");
  fs::create_directories(dir / "c" / "masks");
  WriteSolidPng(dir / "c" / "frames" / "f0.png", 4, 5, 3, 1);
  WriteSolidPng(dir / "c" / "masks" / "m0.png", 4, 6, 1, 0);
  EXPECT_FALSE(LoadClip(dir / "c" / "frames", dir / "c" / "masks").ok());
}

TEST(WindowTest, StartsForStrideOne) {
  LabeledClip clip = CoordinateClip(10, 4, 4);
  auto w = SlidingWindows(clip, 8, 1);
  ASSERT_TRUE(w.ok());
  ASSERT_EQ(w->size(), 3u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ((*w)[i].start_index, i);
    EXPECT_EQ((*w)[i].frames.shape(), (Shape{8, 3, 4, 4}));
    EXPECT_EQ((*w)[i].frames(0, 0, 0, 0), clip.clip.frames[i].pixels(0, 0, 0));
  }
}

TEST(WindowTest, ExactFitAndTooShort) {
  auto one = SlidingWindows(CoordinateClip(8, 4, 4), 8, 8);
  ASSERT_TRUE(one.ok());
  EXPECT_EQ(one->size(), 1u);
  auto short_clip = SlidingWindows(CoordinateClip(4, 4, 4), 8, 1);
  ASSERT_FALSE(short_clip.ok());
  EXPECT_NE(short_clip.status().message().find("shorter than window"),
            std::string::npos);
}

// With stride 1, frame i is covered by min(i, T - t_c, t_c - 1) + 1 windows
// when measured from the nearer end.
TEST(WindowTest, StrideOneCoverageCount) {
  for (int64_t t_len : {8, 9, 13, 20}) {
    const int64_t t_c = 8;
    auto w = SlidingWindows(CoordinateClip(t_len, 2, 2), t_c, 1);
    ASSERT_TRUE(w.ok());
    std::vector<int64_t> count(t_len, 0);
    for (const ClipWindow& win : *w)
      for (int64_t k = 0; k < t_c; ++k) ++count[win.start_index + k];
    for (int64_t i = 0; i < t_len; ++i) {
      const int64_t e = std::min(i, t_len - 1 - i);
      EXPECT_EQ(count[i], std::min({e, t_len - t_c, t_c - 1}) + 1)
          << "T=" << t_len << " i=" << i;
    }
  }
}

TEST(WindowTest, CoverageStartsCoverEveryFrame) {
  for (int64_t t_len : {8, 10, 16, 17, 31}) {
    auto starts = CoverageStarts(t_len, 8);
    ASSERT_TRUE(starts.ok());
    std::vector<bool> seen(t_len, false);
    for (int64_t s : *starts) {
      ASSERT_LE(s + 8, t_len);
      for (int64_t k = 0; k < 8; ++k) seen[s + k] = true;
    }
    EXPECT_TRUE(
        std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
  }
  auto s10 = CoverageStarts(10, 8);
  EXPECT_EQ(*s10, (std::vector<int64_t>{0, 2}));
  EXPECT_FALSE(CoverageStarts(5, 8).ok());
}

TEST(AugmentTest, CropShapeAndSharedTransform) {
  LabeledClip clip = CoordinateClip(8, 40, 50);
  ClipWindow win = ExtractWindow(clip, 0, 8);
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    auto out = Augment(win, rng, 32, 32, 0.5);
    ASSERT_TRUE(out.ok());
    EXPECT_EQ(out->frames.shape(), (Shape{8, 3, 32, 32}));
    EXPECT_EQ(out->masks.shape(), (Shape{8, 32, 32}));
    // Recover the source coordinate from the encoded pixel and check that
    // every frame, channel and the mask used the same one.
    const int64_t code = int64_t(out->frames(0, 0, 0, 0));
    const int64_t y0 = (code / 50) % 40, x0 = code % 50;
    for (int64_t t = 0; t < 8; ++t) {
      for (int64_t c = 0; c < 3; ++c) {
        const int64_t v = int64_t(out->frames(t, c, 0, 0));
        EXPECT_EQ((v / 50) % 40, y0);
        EXPECT_EQ(v % 50, x0);
        EXPECT_EQ(v / (40 * 50), t * 3 + c);
      }
      EXPECT_EQ(out->masks(t, 0, 0), uint8_t((x0 + y0 + t) % 2));
    }
  }
}

TEST(AugmentTest, FlipIsInvolutionAndMirrorsPixels) {
  ClipWindow win = ExtractWindow(CoordinateClip(2, 3, 7), 0, 2);
  ClipWindow f = FlipHorizontal(win);
  for (int64_t x = 0; x < 7; ++x) {
    EXPECT_EQ(f.frames(1, 2, 1, x), win.frames(1, 2, 1, 6 - x));
    EXPECT_EQ(f.masks(1, 2, x), win.masks(1, 2, 6 - x));
  }
  ClipWindow ff = FlipHorizontal(f);
  EXPECT_EQ(oracle::Values(ff.frames), oracle::Values(win.frames));
  EXPECT_EQ(oracle::Values(ff.masks), oracle::Values(win.masks));
}

TEST(AugmentTest, OversizedCropRejected) {
  ClipWindow win = ExtractWindow(CoordinateClip(2, 16, 16), 0, 2);
  Rng rng(1);
  EXPECT_FALSE(Augment(win, rng, 32, 8, 0.5).ok());
  EXPECT_FALSE(Crop(win, 10, 0, 8, 8).ok());
}

TEST(RecompressTest, QualityOrderingAndRange) {
  SynthOptions o;
  o.n_clips = 1;
  o.frames = 2;
  auto synth = SynthesizeClip(o, 0);
  ASSERT_TRUE(synth.ok());
  const VideoClip& clip = synth->inpainted;
  auto q100 = RecompressQf(clip, 100);
  auto q90 = RecompressQf(clip, 90);
  auto q70 = RecompressQf(clip, 70);
  ASSERT_TRUE(q100.ok() && q90.ok() && q70.ok());
  EXPECT_GT(Psnr(clip.frames[0], q100->frames[0]), 40.0);
  EXPECT_GE(Psnr(clip.frames[0], q90->frames[0]),
            Psnr(clip.frames[0], q70->frames[0]));
  EXPECT_EQ(q70->frames[1].pixels.shape(), clip.frames[1].pixels.shape());
  for (float v : q70->frames[0].pixels.values()) {
    EXPECT_GE(v, 0.0f);
    EXPECT_LE(v, 1.0f);
  }
  EXPECT_FALSE(RecompressQf(clip, 0).ok());
  EXPECT_FALSE(RecompressQf(clip, 101).ok());
}

TEST(SynthTest, MaskIsExactlyTheDifference) {
  SynthOptions o;
  o.n_clips = 3;
  for (FillMethod m : {FillMethod::kBlurFill, FillMethod::kDiffusionFill,
                       FillMethod::kTemporalCopy}) {
    o.method = m;
    for (int i = 0; i < o.n_clips; ++i) {
      auto clip = SynthesizeClip(o, i);
      ASSERT_TRUE(clip.ok()) << clip.status();
      const int64_t h = o.height, w = o.width, plane = h * w;
      for (int t = 0; t < o.frames; ++t) {
        const Image8 a = FrameToImage(clip->original.frames[t]);
        const Image8 b = FrameToImage(clip->inpainted.frames[t]);
        for (int64_t p = 0; p < plane; ++p) {
          bool differ = false;
          for (int c = 0; c < 3; ++c)
            differ |= a.pixels[p * 3 + c] != b.pixels[p * 3 + c];
          ASSERT_EQ(differ, clip->masks.masks[t * plane + p] == 1)
              << FillMethodName(m) << " clip " << i << " t " << t;
        }
      }
    }
  }
}

TEST(SynthTest, AreaFractionWithinBounds) {
  SynthOptions o;
  o.n_clips = 20;
  o.frames = 2;
  for (int i = 0; i < o.n_clips; ++i) {
    auto clip = SynthesizeClip(o, i);
    ASSERT_TRUE(clip.ok());
    for (int t = 0; t < o.frames; ++t) {
      int64_t on = 0;
      const int64_t plane = int64_t(o.height) * o.width;
      for (int64_t p = 0; p < plane; ++p)
        on += clip->masks.masks[t * plane + p];
      const double frac = double(on) / double(plane);
      EXPECT_GE(frac, kMinAreaFraction) << "clip " << i;
      EXPECT_LE(frac, kMaxAreaFraction) << "clip " << i;
    }
  }
}

TEST(SynthTest, BlurFillChangesThePixels) {
  SynthOptions o;
  auto clip = SynthesizeClip(o, 0);
  ASSERT_TRUE(clip.ok());
  double l2 = 0;
  for (int t = 0; t < o.frames; ++t) {
    const auto& a = clip->original.frames[t].pixels;
    const auto& b = clip->inpainted.frames[t].pixels;
    for (int64_t i = 0; i < a.size(); ++i) l2 += (a[i] - b[i]) * (a[i] - b[i]);
  }
  EXPECT_GT(l2, 0.0);
}

TEST(SynthTest, RejectsTinyFramesAndUnknownMethod) {
  SynthOptions o;
  o.height = 8;
  EXPECT_FALSE(ValidateSynthOptions(o).ok());
  auto m = ParseFillMethod("magic");
  ASSERT_FALSE(m.ok());
  for (const char* name : {"blur_fill", "diffusion_fill", "temporal_copy"}) {
    EXPECT_NE(m.status().message().find(name), std::string::npos);
    EXPECT_TRUE(ParseFillMethod(name).ok());
  }
}

TEST(SynthTest, GenerateIsByteIdenticalAndLoadable) {
  SynthOptions o;
  o.n_clips = 2;
  o.frames = 3;
  o.seed = 11;
  const fs::path a = FreshDir("syn_a"), b = FreshDir("syn_b");
  ASSERT_TRUE(SynthGenerate(o, a).ok());
  ASSERT_TRUE(SynthGenerate(o, b).ok());
  size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file() || e.path().extension() != ".png") continue;
    const fs::path rel = fs::relative(e.path(), a);
    EXPECT_EQ(Slurp(e.path()), Slurp(b / rel)) << rel;
    ++files;
  }
  EXPECT_EQ(files, 2u * 3u * 2u);

  auto manifest = ReadManifest(a / "manifest.tsv");
  ASSERT_TRUE(manifest.ok());
  auto clips = LoadDataset(*manifest, 1);
  ASSERT_TRUE(clips.ok()) << clips.status();
  auto direct = SynthesizeClip(o, 0);
  ASSERT_TRUE(direct.ok());
  EXPECT_EQ(oracle::Values((*clips)[0].masks.masks),
            oracle::Values(direct->masks.masks));
  for (int64_t i = 0; i < direct->inpainted.frames[1].pixels.size(); ++i) {
    ASSERT_FLOAT_EQ((*clips)[0].clip.frames[1].pixels[i],
                    direct->inpainted.frames[1].pixels[i]);
  }
}

TEST(LoadDatasetTest, OrderIndependentOfWorkers) {
  SynthOptions o;
  o.n_clips = 5;
  o.frames = 2;
  o.height = o.width = 16;
  const fs::path dir = FreshDir("workers");
  auto manifest = SynthGenerate(o, dir);
  ASSERT_TRUE(manifest.ok());
  auto serial = LoadDataset(*manifest, 1);
  auto parallel = LoadDataset(*manifest, 4);
  ASSERT_TRUE(serial.ok() && parallel.ok());
  ASSERT_EQ(serial->size(), 5u);
  for (size_t i = 0; i < 5; ++i) {
    EXPECT_EQ((*serial)[i].clip_id, manifest->records[i].clip_id);
    EXPECT_EQ((*parallel)[i].clip_id, (*serial)[i].clip_id);
    EXPECT_EQ(oracle::Values((*parallel)[i].masks.masks),
              oracle::Values((*serial)[i].masks.masks));
  }
  EXPECT_FALSE(LoadDataset(DatasetManifest{}, 1).ok());
}

}  // namespace
}  // namespace fdin
