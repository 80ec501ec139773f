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
#include <cmath>

#include "flowtrack/vision.h"

namespace flowtrack {
namespace {

void CheckPyramids(const Pyramid& prev, const Pyramid& next) {
  if (prev.levels.empty() || next.levels.empty() ||
      prev.levels.size() != next.levels.size() ||
      prev.levels[0].width() != next.levels[0].width() ||
      prev.levels[0].height() != next.levels[0].height()) {
    throw std::invalid_argument("LK pyramids differ in depth or base size");
  }
}

// Window of radius r around p lies inside the image.
bool WindowInside(const ImageBuffer& img, const Vec2& p, int r) {
  return p.x - r >= 0.0 && p.y - r >= 0.0 && p.x + r <= img.width() - 1 &&
         p.y + r <= img.height() - 1;
}

}  // namespace

double SampleBilinear(const ImageBuffer& g, double x, double y) {
  x = std::clamp(x, 0.0, static_cast<double>(g.width() - 1));
  y = std::clamp(y, 0.0, static_cast<double>(g.height() - 1));
  const int x0 = static_cast<int>(x);
  const int y0 = static_cast<int>(y);
  const int x1 = std::min(x0 + 1, g.width() - 1);
  const int y1 = std::min(y0 + 1, g.height() - 1);
  const double ax = x - x0;
  const double ay = y - y0;
  const std::uint8_t* r0 = g.row(y0);
  const std::uint8_t* r1 = g.row(y1);
  const double top = r0[x0] + ax * (r0[x1] - r0[x0]);
  const double bot = r1[x0] + ax * (r1[x1] - r1[x0]);
  return top + ay * (bot - top);
}

FlowResult TrackPointLk(const Pyramid& prev, const Pyramid& next,
                        const Vec2& point, const LkParams& params,
                        std::vector<LkLevelTrace>* trace) {
  CheckPyramids(prev, next);
  const int r = params.window_radius;
  const int side = 2 * r + 1;
  const std::size_t n = static_cast<std::size_t>(side) * side;
  std::vector<double> tmpl(n), gx(n), gy(n);

  FlowResult result;
  if (!std::isfinite(point.x) || !std::isfinite(point.y) ||
      !WindowInside(prev.levels[0], point, r)) {
    return result;
  }

  Vec2 guess;  // level units
  Vec2 refine;
  const int top = prev.reductions();
  for (int level = top; level >= 0; --level) {
    const ImageBuffer& I = prev.levels[level];
    const ImageBuffer& J = next.levels[level];
    const double scale = std::ldexp(1.0, -level);
    const Vec2 p = scale * point;

    // Template and central-difference gradients of the previous frame.
    double a = 0.0, b = 0.0, c = 0.0;
    std::size_t k = 0;
    for (int dy = -r; dy <= r; ++dy) {
      for (int dx = -r; dx <= r; ++dx, ++k) {
        const double x = p.x + dx, y = p.y + dy;
        tmpl[k] = SampleBilinear(I, x, y);
        gx[k] = 0.5 * (SampleBilinear(I, x + 1.0, y) - SampleBilinear(I, x - 1.0, y));
        gy[k] = 0.5 * (SampleBilinear(I, x, y + 1.0) - SampleBilinear(I, x, y - 1.0));
        a += gx[k] * gx[k];
        b += gx[k] * gy[k];
        c += gy[k] * gy[k];
      }
    }
    a /= n;
    b /= n;
    c /= n;
    const double min_eig = 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    const double det = a * c - b * b;

    LkLevelTrace lt{level, guess, guess, 0, false};
    refine = Vec2{};
    if (min_eig >= params.min_eigenvalue && det > 0.0) {
      lt.solved = true;
      for (int it = 0; it < params.max_iterations; ++it) {
        const Vec2 q = p + guess + refine;
        if (level == 0 && !WindowInside(J, q, r)) {
          if (trace) trace->push_back(lt);
          return result;  // left the frame
        }
        double bx = 0.0, by = 0.0;
        k = 0;
        for (int dy = -r; dy <= r; ++dy) {
          for (int dx = -r; dx <= r; ++dx, ++k) {
            const double diff = tmpl[k] - SampleBilinear(J, q.x + dx, q.y + dy);
            bx += diff * gx[k];
            by += diff * gy[k];
          }
        }
        bx /= n;
        by /= n;
        const Vec2 step{(c * bx - b * by) / det, (a * by - b * bx) / det};
        refine += step;
        lt.iterations = it + 1;
        if (Norm(step) < params.epsilon) break;
      }
    } else if (level == 0) {
      if (trace) trace->push_back(lt);
      return result;  // aperture failure
    }
    lt.refined = guess + refine;
    if (trace) trace->push_back(lt);
    if (level > 0) guess = 2.0 * (guess + refine);
  }

  const Vec2 u = guess + refine;
  const Vec2 end = point + u;
  const ImageBuffer& I0 = prev.levels[0];
  const ImageBuffer& J0 = next.levels[0];
  if (!WindowInside(J0, end, r)) return result;

  double err = 0.0;
  for (int dy = -r; dy <= r; ++dy) {
    for (int dx = -r; dx <= r; ++dx) {
      err += std::abs(SampleBilinear(I0, point.x + dx, point.y + dy) -
                      SampleBilinear(J0, end.x + dx, end.y + dy));
    }
  }
  result.displacement = u;
  result.residual = err / n;
  result.converged = std::isfinite(u.x) && std::isfinite(u.y);
  return result;
}

std::vector<FlowResult> TrackPointsLk(const Pyramid& prev, const Pyramid& next,
                                      std::span<const Vec2> points,
                                      const LkParams& params) {
  CheckPyramids(prev, next);
  std::vector<FlowResult> out(points.size());
  const long count = static_cast<long>(points.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long i = 0; i < count; ++i) {
    out[i] = TrackPointLk(prev, next, points[i], params);
  }
  return out;
}

namespace serial {

std::vector<FlowResult> TrackPointsLk(const Pyramid& prev, const Pyramid& next,
                                      std::span<const Vec2> points,
                                      const LkParams& params) {
  CheckPyramids(prev, next);
  std::vector<FlowResult> out;
  out.reserve(points.size());
  for (const Vec2& p : points) out.push_back(TrackPointLk(prev, next, p, params));
  return out;
}

}  // namespace serial
}  // namespace flowtrack
