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

// Image kernels used by the tracker: luma conversion, binomial pyramids,
// Harris scoring and pyramidal Lucas-Kanade.
//
// Every data-parallel kernel comes in two flavours. The functions in
// `flowtrack` fan out with OpenMP; the twins in `flowtrack::serial` run the
// same per-row / per-point body in a plain loop and serve as the reference
// in tests and in the kernel benchmark. Results are bit-identical.

#ifndef FLOWTRACK_VISION_H_
#define FLOWTRACK_VISION_H_

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "flowtrack/core.h"

namespace flowtrack {

class ImageTooSmall : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Pyramid {
  std::vector<ImageBuffer> levels;  // levels[0] is the input resolution

  int reductions() const { return static_cast<int>(levels.size()) - 1; }
};

// Dims of every level for an image of the given size: ceil-halving.
std::vector<std::pair<int, int>> PyramidLevelDims(int width, int height,
                                                  int levels);

// Integer score map over a frame-aligned rectangle.
struct ScoreMap {
  int x0 = 0;
  int y0 = 0;
  int width = 0;
  int height = 0;
  std::vector<double> values;

  double at(int x, int y) const {
    return values[static_cast<std::size_t>(y - y0) * width + (x - x0)];
  }
};

struct IntRect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
};

struct LkParams {
  int window_radius = 10;
  int max_iterations = 30;
  double epsilon = 0.01;
  double min_eigenvalue = 1e-4;
};

struct FlowResult {
  Vec2 displacement;  // level-0 pixels
  bool converged = false;
  double residual = 0.0;  // mean |I - J| over the final level-0 window
};

// Per-level record of the coarse-to-fine hand-off for one point.
struct LkLevelTrace {
  int level = 0;
  Vec2 guess_in;  // displacement guess entering the level, level units
  Vec2 refined;   // guess plus the level's own refinement, level units
  int iterations = 0;
  bool solved = false;  // false when the level's tensor was near-singular
};

// Luma = round(0.299 R + 0.587 G + 0.114 B). Throws std::invalid_argument
// unless the input has 3 channels.
ImageBuffer ToGrayscale(const ImageBuffer& rgb);

// Level L+1 is level L smoothed by the separable [1 4 6 4 1]/16 kernel
// (replicated borders) and decimated by two. Requires a 1-channel image and
// min(width, height) >= min_top_extent * 2^levels; throws ImageTooSmall
// otherwise.
Pyramid BuildPyramid(const ImageBuffer& gray, int levels,
                     int min_top_extent = 1);

// One reduction step of the pyramid; exposed for tests.
ImageBuffer PyramidDown(const ImageBuffer& gray);

// R = det(M) - k trace(M)^2 with M the 3x3 box sum of Sobel gradient
// products, for every pixel of `region`. Sampling outside the image
// replicates the border. Throws std::out_of_range if region leaves the image.
ScoreMap HarrisResponse(const ImageBuffer& gray, const IntRect& region,
                        double k);

// Up to n Harris corners inside the mask, greedily picked by descending
// response with a 3 px minimum spacing. Candidates are pixels whose whole
// 5x5 Harris support lies inside the mask, falling back to every foreground
// pixel for masks too thin to have such an interior. When no candidate has a
// positive response the mask centroid (or the nearest foreground pixel to it)
// is returned alone.
std::vector<TrackPoint> SelectTrackPoints(const ImageBuffer& gray,
                                          const InstanceMask& mask, int n,
                                          TrackletId id, double harris_k);

// Pyramidal LK for every point. Throws std::invalid_argument when the two
// pyramids differ in depth or level-0 size.
std::vector<FlowResult> TrackPointsLk(const Pyramid& prev, const Pyramid& next,
                                      std::span<const Vec2> points,
                                      const LkParams& params);

// Single-point solve with an optional per-level trace (coarsest first).
FlowResult TrackPointLk(const Pyramid& prev, const Pyramid& next,
                        const Vec2& point, const LkParams& params,
                        std::vector<LkLevelTrace>* trace = nullptr);

// Bilinear sample with coordinates clamped into the image.
double SampleBilinear(const ImageBuffer& gray, double x, double y);

namespace serial {

ImageBuffer ToGrayscale(const ImageBuffer& rgb);
ImageBuffer PyramidDown(const ImageBuffer& gray);
Pyramid BuildPyramid(const ImageBuffer& gray, int levels,
                     int min_top_extent = 1);
ScoreMap HarrisResponse(const ImageBuffer& gray, const IntRect& region,
                        double k);
std::vector<FlowResult> TrackPointsLk(const Pyramid& prev, const Pyramid& next,
                                      std::span<const Vec2> points,
                                      const LkParams& params);

}  // namespace serial
}  // namespace flowtrack

#endif  // FLOWTRACK_VISION_H_
