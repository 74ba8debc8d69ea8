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

#include "fdin/plot.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>

#include "absl/strings/str_format.h"

namespace fdin {
namespace {

constexpr int kGlyphW = 5, kGlyphH = 7, kScale = 2;

// 5x7 bitmap glyphs, one byte per row, MSB of the low 5 bits leftmost.
const std::array<uint8_t, kGlyphH>* Glyph(char ch) {
  struct Entry {
    char c;
    std::array<uint8_t, kGlyphH> rows;
  };
  static const Entry kFont[] = {
      {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
      {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
      {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
      {'D', {0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E}},
      {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
      {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
      {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
      {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
      {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
      {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
      {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
      {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
      {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
      {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
      {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
      {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
      {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
      {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
      {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
      {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
      {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
      {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
      {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
      {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
      {'Y', {0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04}},
      {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
      {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
      {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
      {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
      {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
      {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
      {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
      {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
      {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
      {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
      {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
      {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
      {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
      {'/', {0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10}},
      {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
      {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}},
  };
  const char up =
      static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  for (const Entry& e : kFont) {
    if (e.c == up) return &e.rows;
  }
  return nullptr;  // blank
}

struct Rgb {
  uint8_t r, g, b;
};

constexpr Rgb kBlack{0, 0, 0}, kGrid{220, 220, 220};
constexpr Rgb kPalette[] = {
    {31, 119, 180}, {255, 127, 14}, {44, 160, 44}, {214, 39, 40}};

class Canvas {
 public:
  Canvas(int w, int h)
      : img_{w, h, 3, std::vector<uint8_t>(size_t(w) * h * 3, 255)} {}

  void Fill(int x0, int y0, int x1, int y1, Rgb c) {
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, img_.width);
    y1 = std::min(y1, img_.height);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        uint8_t* p = &img_.pixels[(size_t(y) * img_.width + x) * 3];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
      }
    }
  }

  static int TextWidth(const std::string& s) {
    return int(s.size()) * (kGlyphW + 1) * kScale;
  }

  void Text(int x, int y, const std::string& s, Rgb c) {
    for (char ch : s) {
      if (const auto* g = Glyph(ch)) {
        for (int row = 0; row < kGlyphH; ++row) {
          for (int col = 0; col < kGlyphW; ++col) {
            if ((*g)[row] >> (kGlyphW - 1 - col) & 1) {
              Fill(x + col * kScale, y + row * kScale, x + (col + 1) * kScale,
                   y + (row + 1) * kScale, c);
            }
          }
        }
      }
      x += (kGlyphW + 1) * kScale;
    }
  }

  Image8 Take() { return std::move(img_); }

 private:
  Image8 img_;
};

}  // namespace

Image8 RenderBarChart(const std::string& title,
                      const std::vector<std::string>& categories,
                      const std::vector<PlotSeries>& series) {
  const int left = 70, right = 20, top = 50, bottom = 50;
  const int bar_w = 28, gap = 40;
  const int groups = std::max<int>(1, categories.size());
  const int nser = std::max<int>(1, series.size());
  int group_w = nser * bar_w;
  for (const auto& c : categories) {
    group_w = std::max(group_w, Canvas::TextWidth(c));
  }
  const int plot_w = groups * group_w + (groups + 1) * gap;
  const int plot_h = 240;
  const int width =
      std::max(left + plot_w + right, Canvas::TextWidth(title) + 2 * left);
  const int height = top + plot_h + bottom;
  Canvas cv(width, height);
  const int y0 = top + plot_h;  // value 0

  for (int tick = 0; tick <= 4; ++tick) {
    const int y = y0 - tick * plot_h / 4;
    cv.Fill(left, y, left + plot_w, y + 1, tick == 0 ? kBlack : kGrid);
    cv.Text(8, y - kGlyphH, absl::StrFormat("%.2f", tick / 4.0), kBlack);
  }
  cv.Fill(left - 1, top, left, y0 + 1, kBlack);

  for (int g = 0; g < int(categories.size()); ++g) {
    const int gx = left + gap + g * (group_w + gap);
    const int bx = gx + (group_w - nser * bar_w) / 2;
    for (int s = 0; s < int(series.size()); ++s) {
      double v = g < int(series[s].values.size()) ? series[s].values[g] : 0.0;
      v = std::clamp(v, 0.0, 1.0);
      const int h = int(v * plot_h + 0.5);
      cv.Fill(bx + s * bar_w + 2, y0 - h, bx + (s + 1) * bar_w - 2, y0,
              kPalette[s % 4]);
    }
    const std::string& label = categories[g];
    cv.Text(gx + (group_w - Canvas::TextWidth(label)) / 2, y0 + 12, label,
            kBlack);
  }

  cv.Text(left, 12, title, kBlack);
  int lx = width - right;
  for (int s = int(series.size()) - 1; s >= 0; --s) {
    lx -= Canvas::TextWidth(series[s].label) + 24;
    cv.Fill(lx, 34, lx + 12, 46, kPalette[s % 4]);
    cv.Text(lx + 16, 33, series[s].label, kBlack);
  }
  return cv.Take();
}

absl::Status WriteBarChart(const std::filesystem::path& path,
                           const std::string& title,
                           const std::vector<std::string>& categories,
                           const std::vector<PlotSeries>& series) {
  return WritePng(path, RenderBarChart(title, categories, series));
}

}  // namespace fdin
