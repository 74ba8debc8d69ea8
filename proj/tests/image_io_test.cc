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

#include "fdin/image_io.h"

#include <filesystem>
#include <fstream>

#include "fdin/plot.h"
#include "fdin/rng.h"
#include "gtest/gtest.h"

namespace fdin {
namespace {

namespace fs = std::filesystem;

Image8 Noise(int h, int w, int c, uint64_t seed) {
  Rng rng(seed);
  Image8 img{w, h, c, std::vector<uint8_t>(size_t(h) * w * c)};
  for (auto& v : img.pixels) v = uint8_t(UniformInt(rng, 0, 255));
  return img;
}

TEST(ImageIoTest, PngRoundTripIsLossless) {
  const fs::path dir = fs::path(::testing::TempDir()) / "fdin_img";
  fs::create_directories(dir);
  for (int c : {1, 3}) {
    const Image8 img = Noise(7, 9, c, c);
    ASSERT_TRUE(WritePng(dir / "a.png", img).ok());
    auto back = ReadImage(dir / "a.png", c);
    ASSERT_TRUE(back.ok()) << back.status();
    EXPECT_EQ(back->width, 9);
    EXPECT_EQ(back->height, 7);
    EXPECT_EQ(back->pixels, img.pixels);
  }
}

TEST(ImageIoTest, GrayPngExpandsToColor) {
  const fs::path p = fs::path(::testing::TempDir()) / "fdin_gray.png";
  const Image8 img = Noise(4, 4, 1, 5);
  ASSERT_TRUE(WritePng(p, img).ok());
  auto rgb = ReadImage(p, 3);
  ASSERT_TRUE(rgb.ok());
  for (size_t i = 0; i < img.pixels.size(); ++i) {
    EXPECT_EQ(rgb->pixels[i * 3], img.pixels[i]);
    EXPECT_EQ(rgb->pixels[i * 3 + 2], img.pixels[i]);
  }
}

TEST(ImageIoTest, JpegRoundTripIsClose) {
  Image8 img{16, 16, 3, std::vector<uint8_t>(16 * 16 * 3)};
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x)
      for (int c = 0; c < 3; ++c)
        img.pixels[(y * 16 + x) * 3 + c] = uint8_t(8 * x + 4 * y + 20 * c);
  auto bytes = EncodeJpeg(img, 95);
  ASSERT_TRUE(bytes.ok());
  auto back = DecodeJpeg(*bytes, 3);
  ASSERT_TRUE(back.ok());
  int worst = 0;
  for (size_t i = 0; i < img.pixels.size(); ++i)
    worst = std::max(worst, std::abs(int(img.pixels[i]) - back->pixels[i]));
  EXPECT_LE(worst, 8);
}

TEST(ImageIoTest, CorruptInputReportsError) {
  std::vector<uint8_t> junk = {0xFF, 0xD8, 0xFF, 0x00, 0x12, 0x34};
  EXPECT_FALSE(DecodeJpeg(junk, 3).ok());
  const fs::path p = fs::path(::testing::TempDir()) / "fdin_junk.png";
  std::ofstream(p, std::ios::binary) << "\x89PNG\r\n\x1a\nnot really";
  EXPECT_FALSE(ReadImage(p, 3).ok());
  EXPECT_FALSE(ReadImage("/nonexistent/x.png", 3).ok());
  EXPECT_FALSE(EncodeJpeg(Noise(4, 4, 3, 1), 0).ok());
}

TEST(PlotTest, ChartReflectsValues) {
  const Image8 a = RenderBarChart("t", {"x", "y"}, {{"s", {0.2, 0.9}}});
  const Image8 b = RenderBarChart("t", {"x", "y"}, {{"s", {0.9, 0.2}}});
  EXPECT_GT(a.width, 0);
  EXPECT_EQ(a.channels, 3);
  EXPECT_EQ(a.pixels.size(), size_t(a.width) * a.height * 3);
  EXPECT_NE(a.pixels, b.pixels);
  const fs::path p = fs::path(::testing::TempDir()) / "fdin_chart.png";
  ASSERT_TRUE(WriteBarChart(p, "t", {"x", "y"},
                            {{"mIoU", {0.5, 0.4}}, {"F1", {0.6, 0.5}}})
                  .ok());
  auto back = ReadImage(p, 3);
  ASSERT_TRUE(back.ok());
  EXPECT_GT(back->width, 0);
}

}  // namespace
}  // namespace fdin
