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

#ifndef FLOWTRACK_CORE_H_
#define FLOWTRACK_CORE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace flowtrack {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
  friend Vec2 operator-(const Vec2& a, const Vec2& b) {
    return {a.x - b.x, a.y - b.y};
  }
  friend Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(double s, const Vec2& a) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

double Norm(const Vec2& v);

// Row-major 8-bit raster with 1 (luma) or 3 (RGB) interleaved channels.
// at() is bounds-checked and throws std::out_of_range; kernels that need
// clamping do it themselves before indexing through row().
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int width, int height, int channels, std::uint8_t fill = 0);
  ImageBuffer(int width, int height, int channels,
              std::vector<std::uint8_t> data);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return data_.empty(); }

  std::uint8_t at(int x, int y, int c = 0) const;
  std::uint8_t& at(int x, int y, int c = 0);

  const std::uint8_t* row(int y) const {
    return data_.data() + static_cast<std::size_t>(y) * width_ * channels_;
  }
  std::uint8_t* row(int y) {
    return data_.data() + static_cast<std::size_t>(y) * width_ * channels_;
  }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> data() { return data_; }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<std::uint8_t> data_;
};

// Axis-aligned box in real-valued pixel coordinates: (x, y) is the top-left
// corner. Boxes stay real so that accumulated sub-pixel shifts do not drift.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  bool valid() const { return w > 0.0 && h > 0.0; }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

// Throws std::invalid_argument unless w > 0 and h > 0.
BoundingBox MakeBox(double x, double y, double w, double h);

Vec2 BoxCenter(const BoundingBox& box);
BoundingBox TranslateBox(const BoundingBox& box, const Vec2& d);

// Area of the intersection; 0 when disjoint or only touching.
double IntersectionArea(const BoundingBox& a, const BoundingBox& b);
bool Intersects(const BoundingBox& a, const BoundingBox& b);
// Half-open containment: x <= p.x < x + w, same for y.
bool BoxContains(const BoundingBox& box, const Vec2& p);

// Dense bitmap with a local origin in frame coordinates. A mask always holds
// at least one foreground bit; construction rejects empty bitmaps.
class InstanceMask {
 public:
  InstanceMask(int origin_x, int origin_y, int width, int height,
               std::vector<std::uint8_t> bits);

  // Fully set rectangular mask.
  static InstanceMask Filled(int origin_x, int origin_y, int width,
                             int height);

  int origin_x() const { return origin_x_; }
  int origin_y() const { return origin_y_; }
  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const std::uint8_t> bits() const { return bits_; }

  // Local-coordinate test; false outside the extent.
  bool test(int lx, int ly) const {
    if (lx < 0 || ly < 0 || lx >= width_ || ly >= height_) return false;
    return bits_[static_cast<std::size_t>(ly) * width_ + lx] != 0;
  }

  int ForegroundCount() const;
  // Mean frame coordinate of foreground pixels.
  Vec2 Centroid() const;
  // Extent of the bitmap in frame coordinates.
  BoundingBox Extent() const;
  // Tight bounding box of the foreground bits in frame coordinates.
  BoundingBox ForegroundExtent() const;

  InstanceMask Translated(int dx, int dy) const;
  // Intersection with an integer rectangle; nullopt when nothing survives.
  std::optional<InstanceMask> Cropped(int x, int y, int w, int h) const;
  // Smallest mask with the same foreground, trimmed to the foreground extent.
  InstanceMask Trimmed() const;

  // True when the mask extent lies inside a frame of the given size.
  bool WithinFrame(int frame_w, int frame_h) const;

  friend bool operator==(const InstanceMask&, const InstanceMask&) = default;

 private:
  int origin_x_ = 0;
  int origin_y_ = 0;
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

// True iff (round(x), round(y)) indexes a foreground bit.
bool MaskContains(const InstanceMask& mask, const Vec2& p);

struct Detection {
  int class_id = 0;
  BoundingBox box;
  std::optional<InstanceMask> mask;
  double confidence = 0.0;
};

// Checks confidence range and the mask-within-box (+2 px) tolerance. Throws
// std::invalid_argument naming the violated invariant.
void ValidateDetection(const Detection& det);

using TrackletId = std::int64_t;

struct TrackPoint {
  Vec2 pos;
  TrackletId id = 0;
  bool alive = true;
};

enum class TrackletState { kSpurious = 0, kConfident = 1, kTerminated = 2 };

const char* ToString(TrackletState state);

struct Tracklet {
  TrackletId id = 0;
  int class_id = 0;
  BoundingBox box;
  std::vector<TrackPoint> points;
  double confidence = 0.0;
  TrackletState state = TrackletState::kSpurious;
  int last_redetect_frame = 0;
  int birth_frame = 0;
  // Set when LK lost every point; the scheduler probes its window first.
  bool needs_redetect = false;

  bool live() const { return state != TrackletState::kTerminated; }
  int AlivePointCount() const;
};

// Applies a lifecycle transition. Only Spurious->Confident, Spurious->Terminated
// and Confident->Terminated are legal; a same-state request is a no-op.
// Throws std::logic_error on anything else.
void TransitionTo(Tracklet& tracklet, TrackletState next);

// Hands out strictly increasing ids, never reused within a run.
class IdAllocator {
 public:
  explicit IdAllocator(TrackletId first = 1) : next_(first) {}
  TrackletId Next() { return next_++; }
  TrackletId peek() const { return next_; }

 private:
  TrackletId next_;
};

}  // namespace flowtrack

#endif  // FLOWTRACK_CORE_H_
