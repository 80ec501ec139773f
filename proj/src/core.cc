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

#include "flowtrack/core.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace flowtrack {

double Norm(const Vec2& v) { return std::hypot(v.x, v.y); }

ImageBuffer::ImageBuffer(int width, int height, int channels,
                         std::uint8_t fill)
    : width_(width), height_(height), channels_(channels) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument(
        fmt::format("image dims must be >= 1, got {}x{}", width, height));
  }
  if (channels != 1 && channels != 3) {
    throw std::invalid_argument(
        fmt::format("image channels must be 1 or 3, got {}", channels));
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

ImageBuffer::ImageBuffer(int width, int height, int channels,
                         std::vector<std::uint8_t> data)
    : ImageBuffer(width, height, channels) {
  if (data.size() != data_.size()) {
    throw std::invalid_argument(fmt::format(
        "image data length {} != {}x{}x{}", data.size(), width, height,
        channels));
  }
  data_ = std::move(data);
}

std::uint8_t ImageBuffer::at(int x, int y, int c) const {
  if (x < 0 || y < 0 || c < 0 || x >= width_ || y >= height_ ||
      c >= channels_) {
    throw std::out_of_range(fmt::format("pixel ({}, {}, {}) outside {}x{}x{}",
                                        x, y, c, width_, height_, channels_));
  }
  return row(y)[x * channels_ + c];
}

std::uint8_t& ImageBuffer::at(int x, int y, int c) {
  if (x < 0 || y < 0 || c < 0 || x >= width_ || y >= height_ ||
      c >= channels_) {
    throw std::out_of_range(fmt::format("pixel ({}, {}, {}) outside {}x{}x{}",
                                        x, y, c, width_, height_, channels_));
  }
  return row(y)[x * channels_ + c];
}

BoundingBox MakeBox(double x, double y, double w, double h) {
  if (!(w > 0.0) || !(h > 0.0)) {
    throw std::invalid_argument(
        fmt::format("box extent must be positive, got {}x{}", w, h));
  }
  return {x, y, w, h};
}

Vec2 BoxCenter(const BoundingBox& box) {
  return {box.x + box.w / 2.0, box.y + box.h / 2.0};
}

BoundingBox TranslateBox(const BoundingBox& box, const Vec2& d) {
  return {box.x + d.x, box.y + d.y, box.w, box.h};
}

double IntersectionArea(const BoundingBox& a, const BoundingBox& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

bool Intersects(const BoundingBox& a, const BoundingBox& b) {
  return IntersectionArea(a, b) > 0.0;
}

bool BoxContains(const BoundingBox& box, const Vec2& p) {
  return p.x >= box.x && p.x < box.right() && p.y >= box.y &&
         p.y < box.bottom();
}

InstanceMask::InstanceMask(int origin_x, int origin_y, int width, int height,
                           std::vector<std::uint8_t> bits)
    : origin_x_(origin_x),
      origin_y_(origin_y),
      width_(width),
      height_(height),
      bits_(std::move(bits)) {
  if (width < 1 || height < 1) {
    throw std::invalid_argument(
        fmt::format("mask dims must be >= 1, got {}x{}", width, height));
  }
  if (bits_.size() != static_cast<std::size_t>(width) * height) {
    throw std::invalid_argument(fmt::format(
        "mask bitmap length {} != {}x{}", bits_.size(), width, height));
  }
  bool any = false;
  for (auto& b : bits_) {
    b = b ? 1 : 0;
    any = any || b;
  }
  if (!any) throw std::invalid_argument("mask has no foreground bits");
}

InstanceMask InstanceMask::Filled(int origin_x, int origin_y, int width,
                                  int height) {
  return InstanceMask(
      origin_x, origin_y, width, height,
      std::vector<std::uint8_t>(
          static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0),
          1));
}

int InstanceMask::ForegroundCount() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), 1));
}

Vec2 InstanceMask::Centroid() const {
  double sx = 0.0, sy = 0.0;
  int n = 0;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!test(x, y)) continue;
      sx += x;
      sy += y;
      ++n;
    }
  }
  return {origin_x_ + sx / n, origin_y_ + sy / n};
}

BoundingBox InstanceMask::Extent() const {
  return {static_cast<double>(origin_x_), static_cast<double>(origin_y_),
          static_cast<double>(width_), static_cast<double>(height_)};
}

BoundingBox InstanceMask::ForegroundExtent() const {
  int x0 = width_, y0 = height_, x1 = -1, y1 = -1;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!test(x, y)) continue;
      x0 = std::min(x0, x);
      y0 = std::min(y0, y);
      x1 = std::max(x1, x);
      y1 = std::max(y1, y);
    }
  }
  return {static_cast<double>(origin_x_ + x0),
          static_cast<double>(origin_y_ + y0), static_cast<double>(x1 - x0 + 1),
          static_cast<double>(y1 - y0 + 1)};
}

InstanceMask InstanceMask::Translated(int dx, int dy) const {
  InstanceMask out = *this;
  out.origin_x_ += dx;
  out.origin_y_ += dy;
  return out;
}

std::optional<InstanceMask> InstanceMask::Cropped(int x, int y, int w,
                                                  int h) const {
  const int x0 = std::max(x, origin_x_);
  const int y0 = std::max(y, origin_y_);
  const int x1 = std::min(x + w, origin_x_ + width_);
  const int y1 = std::min(y + h, origin_y_ + height_);
  if (x1 <= x0 || y1 <= y0) return std::nullopt;
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(x1 - x0) * (y1 - y0));
  bool any = false;
  for (int yy = y0; yy < y1; ++yy) {
    for (int xx = x0; xx < x1; ++xx) {
      const bool on = test(xx - origin_x_, yy - origin_y_);
      bits[static_cast<std::size_t>(yy - y0) * (x1 - x0) + (xx - x0)] = on;
      any = any || on;
    }
  }
  if (!any) return std::nullopt;
  return InstanceMask(x0, y0, x1 - x0, y1 - y0, std::move(bits));
}

InstanceMask InstanceMask::Trimmed() const {
  const BoundingBox e = ForegroundExtent();
  return *Cropped(static_cast<int>(e.x), static_cast<int>(e.y),
                  static_cast<int>(e.w), static_cast<int>(e.h));
}

bool InstanceMask::WithinFrame(int frame_w, int frame_h) const {
  return origin_x_ >= 0 && origin_y_ >= 0 && origin_x_ + width_ <= frame_w &&
         origin_y_ + height_ <= frame_h;
}

bool MaskContains(const InstanceMask& mask, const Vec2& p) {
  if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  const long px = std::lround(p.x);
  const long py = std::lround(p.y);
  return mask.test(static_cast<int>(px - mask.origin_x()),
                   static_cast<int>(py - mask.origin_y()));
}

void ValidateDetection(const Detection& det) {
  if (!(det.confidence >= 0.0 && det.confidence <= 1.0)) {
    throw std::invalid_argument(
        fmt::format("detection confidence {} outside [0,1]", det.confidence));
  }
  if (!det.box.valid()) {
    throw std::invalid_argument("detection box must have positive extent");
  }
  if (det.mask) {
    constexpr double kTol = 2.0;
    const BoundingBox e = det.mask->ForegroundExtent();
    if (e.x < det.box.x - kTol || e.y < det.box.y - kTol ||
        e.right() > det.box.right() + kTol ||
        e.bottom() > det.box.bottom() + kTol) {
      throw std::invalid_argument("detection mask extends beyond its box");
    }
  }
}

const char* ToString(TrackletState state) {
  switch (state) {
    case TrackletState::kSpurious:
      return "spurious";
    case TrackletState::kConfident:
      return "confident";
    case TrackletState::kTerminated:
      return "terminated";
  }
  return "unknown";
}

int Tracklet::AlivePointCount() const {
  return static_cast<int>(std::count_if(
      points.begin(), points.end(), [](const TrackPoint& p) { return p.alive; }));
}

void TransitionTo(Tracklet& tracklet, TrackletState next) {
  const TrackletState cur = tracklet.state;
  if (cur == next) return;
  const bool legal =
      (cur == TrackletState::kSpurious && next != TrackletState::kSpurious) ||
      (cur == TrackletState::kConfident && next == TrackletState::kTerminated);
  if (!legal) {
    throw std::logic_error(fmt::format("illegal tracklet transition {} -> {}",
                                       ToString(cur), ToString(next)));
  }
  tracklet.state = next;
}

}  // namespace flowtrack
