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

#include <cmath>

#include <fmt/format.h>

#include "flowtrack/vision.h"

namespace flowtrack {
namespace {

void CheckRgb(const ImageBuffer& rgb) {
  if (rgb.channels() != 3) {
    throw std::invalid_argument(
        fmt::format("ToGrayscale expects 3 channels, got {}", rgb.channels()));
  }
}

inline void LumaRow(const ImageBuffer& rgb, ImageBuffer& out, int y) {
  const std::uint8_t* src = rgb.row(y);
  std::uint8_t* dst = out.row(y);
  for (int x = 0; x < rgb.width(); ++x) {
    const double v =
        0.299 * src[3 * x] + 0.587 * src[3 * x + 1] + 0.114 * src[3 * x + 2];
    dst[x] = static_cast<std::uint8_t>(std::lround(v > 255.0 ? 255.0 : v));
  }
}

}  // namespace

ImageBuffer ToGrayscale(const ImageBuffer& rgb) {
  CheckRgb(rgb);
  ImageBuffer out(rgb.width(), rgb.height(), 1);
#pragma omp parallel for schedule(static)
  for (int y = 0; y < rgb.height(); ++y) LumaRow(rgb, out, y);
  return out;
}

namespace serial {

ImageBuffer ToGrayscale(const ImageBuffer& rgb) {
  CheckRgb(rgb);
  ImageBuffer out(rgb.width(), rgb.height(), 1);
  for (int y = 0; y < rgb.height(); ++y) LumaRow(rgb, out, y);
  return out;
}

}  // namespace serial
}  // namespace flowtrack
