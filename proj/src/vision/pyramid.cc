/* Copyright 2026 The Flowtrack Authors. All Rights Reserved.

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

#include <algorithm>
#include <cstdint>

#include <fmt/format.h>

#include "flowtrack/vision.h"

namespace flowtrack {
namespace {

constexpr int kTaps[5] = {1, 4, 6, 4, 1};

inline int Clamp(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

void CheckGray(const ImageBuffer& img) {
  if (img.channels() != 1) {
    throw std::invalid_argument(
        fmt::format("pyramid expects 1 channel, got {}", img.channels()));
  }
}

// Horizontal taps at even source columns; sums carry a factor of 16.
inline void HorizontalRow(const ImageBuffer& src, std::uint16_t* dst, int y,
                          int out_w) {
  const std::uint8_t* row = src.row(y);
  const int last = src.width() - 1;
  for (int xo = 0; xo < out_w; ++xo) {
    const int xc = 2 * xo;
    int acc = 0;
    for (int k = 0; k < 5; ++k) acc += kTaps[k] * row[Clamp(xc + k - 2, 0, last)];
    dst[xo] = static_cast<std::uint16_t>(acc);
  }
}

// Vertical taps at even source rows over the horizontal pass; the total
// weight is 256, rounded to nearest.
inline void VerticalRow(const std::vector<std::uint16_t>& tmp, int src_h,
                        int out_w, ImageBuffer& out, int yo) {
  const int yc = 2 * yo;
  std::uint8_t* dst = out.row(yo);
  for (int xo = 0; xo < out_w; ++xo) {
    int acc = 0;
    for (int k = 0; k < 5; ++k) {
      const int ys = Clamp(yc + k - 2, 0, src_h - 1);
      acc += kTaps[k] * tmp[static_cast<std::size_t>(ys) * out_w + xo];
    }
    dst[xo] = static_cast<std::uint8_t>((acc + 128) >> 8);
  }
}

void CheckPyramidFits(const ImageBuffer& gray, int levels, int min_top_extent) {
  if (levels < 0) throw std::invalid_argument("pyramid levels must be >= 0");
  const long long need = static_cast<long long>(min_top_extent) << levels;
  if (levels > 30 || std::min(gray.width(), gray.height()) < need) {
    throw ImageTooSmall(fmt::format(
        "{}x{} image too small for {} pyramid levels (top extent >= {})",
        gray.width(), gray.height(), levels, min_top_extent));
  }
}

}  // namespace

std::vector<std::pair<int, int>> PyramidLevelDims(int width, int height,
                                                  int levels) {
  std::vector<std::pair<int, int>> dims{{width, height}};
  for (int l = 1; l <= levels; ++l) {
    dims.emplace_back((dims.back().first + 1) / 2, (dims.back().second + 1) / 2);
  }
  return dims;
}

ImageBuffer PyramidDown(const ImageBuffer& gray) {
  CheckGray(gray);
  const int out_w = (gray.width() + 1) / 2;
  const int out_h = (gray.height() + 1) / 2;
  std::vector<std::uint16_t> tmp(static_cast<std::size_t>(out_w) *
                                 gray.height());
  ImageBuffer out(out_w, out_h, 1);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int y = 0; y < gray.height(); ++y) {
      HorizontalRow(gray, tmp.data() + static_cast<std::size_t>(y) * out_w, y,
                    out_w);
    }
#pragma omp for schedule(static)
    for (int yo = 0; yo < out_h; ++yo) {
      VerticalRow(tmp, gray.height(), out_w, out, yo);
    }
  }
  return out;
}

Pyramid BuildPyramid(const ImageBuffer& gray, int levels, int min_top_extent) {
  CheckGray(gray);
  CheckPyramidFits(gray, levels, min_top_extent);
  Pyramid pyr;
  pyr.levels.reserve(levels + 1);
  pyr.levels.push_back(gray);
  for (int l = 1; l <= levels; ++l) pyr.levels.push_back(PyramidDown(pyr.levels.back()));
  return pyr;
}

namespace serial {

ImageBuffer PyramidDown(const ImageBuffer& gray) {
  CheckGray(gray);
  const int out_w = (gray.width() + 1) / 2;
  const int out_h = (gray.height() + 1) / 2;
  std::vector<std::uint16_t> tmp(static_cast<std::size_t>(out_w) *
                                 gray.height());
  ImageBuffer out(out_w, out_h, 1);
  for (int y = 0; y < gray.height(); ++y) {
    HorizontalRow(gray, tmp.data() + static_cast<std::size_t>(y) * out_w, y,
                  out_w);
  }
  for (int yo = 0; yo < out_h; ++yo) VerticalRow(tmp, gray.height(), out_w, out, yo);
  return out;
}

Pyramid BuildPyramid(const ImageBuffer& gray, int levels, int min_top_extent) {
  CheckGray(gray);
  CheckPyramidFits(gray, levels, min_top_extent);
  Pyramid pyr;
  pyr.levels.push_back(gray);
  for (int l = 1; l <= levels; ++l) pyr.levels.push_back(serial::PyramidDown(pyr.levels.back()));
  return pyr;
}

}  // namespace serial
}  // namespace flowtrack
