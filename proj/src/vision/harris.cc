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

#include <fmt/format.h>

#include "flowtrack/vision.h"

namespace flowtrack {
namespace {

inline int Clamp(int v, int lo, int hi) { return std::min(std::max(v, lo), hi); }

inline int Px(const ImageBuffer& g, int x, int y) {
  return g.row(Clamp(y, 0, g.height() - 1))[Clamp(x, 0, g.width() - 1)];
}

void CheckRegion(const ImageBuffer& gray, const IntRect& r) {
  if (gray.channels() != 1) {
    throw std::invalid_argument("HarrisResponse expects a 1-channel image");
  }
  if (r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.x + r.w > gray.width() ||
      r.y + r.h > gray.height()) {
    throw std::out_of_range(fmt::format(
        "harris region ({}, {}, {}x{}) outside {}x{} image", r.x, r.y, r.w,
        r.h, gray.width(), gray.height()));
  }
}

// Gradient products over the region grown by one pixel on each side.
struct TensorField {
  int x0, y0, w, h;
  std::vector<double> xx, xy, yy;
};

inline void GradientRow(const ImageBuffer& g, TensorField& f, int j) {
  const int y = f.y0 + j;
  for (int i = 0; i < f.w; ++i) {
    const int x = f.x0 + i;
    const int gx = (Px(g, x + 1, y - 1) + 2 * Px(g, x + 1, y) + Px(g, x + 1, y + 1)) -
                   (Px(g, x - 1, y - 1) + 2 * Px(g, x - 1, y) + Px(g, x - 1, y + 1));
    const int gy = (Px(g, x - 1, y + 1) + 2 * Px(g, x, y + 1) + Px(g, x + 1, y + 1)) -
                   (Px(g, x - 1, y - 1) + 2 * Px(g, x, y - 1) + Px(g, x + 1, y - 1));
    const std::size_t k = static_cast<std::size_t>(j) * f.w + i;
    f.xx[k] = static_cast<double>(gx) * gx;
    f.xy[k] = static_cast<double>(gx) * gy;
    f.yy[k] = static_cast<double>(gy) * gy;
  }
}

inline void ResponseRow(const TensorField& f, ScoreMap& out, double k, int j) {
  for (int i = 0; i < out.width; ++i) {
    double a = 0.0, b = 0.0, c = 0.0;
    for (int dj = 0; dj < 3; ++dj) {
      const std::size_t base = static_cast<std::size_t>(j + dj) * f.w + i;
      for (int di = 0; di < 3; ++di) {
        a += f.xx[base + di];
        b += f.xy[base + di];
        c += f.yy[base + di];
      }
    }
    const double tr = a + c;
    out.values[static_cast<std::size_t>(j) * out.width + i] =
        (a * c - b * b) - k * tr * tr;
  }
}

TensorField MakeField(const IntRect& r) {
  TensorField f{r.x - 1, r.y - 1, r.w + 2, r.h + 2, {}, {}, {}};
  const std::size_t n = static_cast<std::size_t>(f.w) * f.h;
  f.xx.resize(n);
  f.xy.resize(n);
  f.yy.resize(n);
  return f;
}

ScoreMap MakeMap(const IntRect& r) {
  ScoreMap m{r.x, r.y, r.w, r.h, {}};
  m.values.resize(static_cast<std::size_t>(r.w) * r.h);
  return m;
}

}  // namespace

ScoreMap HarrisResponse(const ImageBuffer& gray, const IntRect& region,
                        double k) {
  CheckRegion(gray, region);
  TensorField f = MakeField(region);
  ScoreMap out = MakeMap(region);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int j = 0; j < f.h; ++j) GradientRow(gray, f, j);
#pragma omp for schedule(static)
    for (int j = 0; j < out.height; ++j) ResponseRow(f, out, k, j);
  }
  return out;
}

namespace serial {

ScoreMap HarrisResponse(const ImageBuffer& gray, const IntRect& region,
                        double k) {
  CheckRegion(gray, region);
  TensorField f = MakeField(region);
  ScoreMap out = MakeMap(region);
  for (int j = 0; j < f.h; ++j) GradientRow(gray, f, j);
  for (int j = 0; j < out.height; ++j) ResponseRow(f, out, k, j);
  return out;
}

}  // namespace serial

std::vector<TrackPoint> SelectTrackPoints(const ImageBuffer& gray,
                                          const InstanceMask& mask, int n,
                                          TrackletId id, double harris_k) {
  std::vector<TrackPoint> out;
  if (n < 1) return out;

  // Restrict to the part of the mask that lies in the image.
  const auto clipped = mask.Cropped(0, 0, gray.width(), gray.height());
  if (!clipped) return out;
  const InstanceMask& m = *clipped;
  const IntRect region{m.origin_x(), m.origin_y(), m.width(), m.height()};
  const ScoreMap score = serial::HarrisResponse(gray, region, harris_k);

  struct Candidate {
    double score;
    int x, y;
  };
  auto interior = [&](int lx, int ly) {
    for (int dy = -2; dy <= 2; ++dy) {
      for (int dx = -2; dx <= 2; ++dx) {
        if (!m.test(lx + dx, ly + dy)) return false;
      }
    }
    return true;
  };
  std::vector<Candidate> strict, loose;
  for (int ly = 0; ly < m.height(); ++ly) {
    for (int lx = 0; lx < m.width(); ++lx) {
      if (!m.test(lx, ly)) continue;
      const int x = m.origin_x() + lx, y = m.origin_y() + ly;
      const double r = score.at(x, y);
      if (!(r > 0.0)) continue;
      (interior(lx, ly) ? strict : loose).push_back({r, x, y});
    }
  }
  std::vector<Candidate>& cands = strict;
  if (cands.empty()) cands = std::move(loose);
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) {
                     return a.score > b.score;
                   });

  constexpr double kMinSpacingSq = 3.0 * 3.0;
  for (const auto& c : cands) {
    if (static_cast<int>(out.size()) == n) break;
    const Vec2 p{static_cast<double>(c.x), static_cast<double>(c.y)};
    const bool spaced = std::all_of(out.begin(), out.end(), [&](const TrackPoint& q) {
      const Vec2 d = q.pos - p;
      return d.x * d.x + d.y * d.y >= kMinSpacingSq;
    });
    if (spaced) out.push_back({p, id, true});
  }
  if (!out.empty()) return out;

  const Vec2 centroid = m.Centroid();
  Vec2 c = centroid;
  if (!MaskContains(m, c)) {
    double best = 1e300;
    for (int ly = 0; ly < m.height(); ++ly) {
      for (int lx = 0; lx < m.width(); ++lx) {
        if (!m.test(lx, ly)) continue;
        const Vec2 p{static_cast<double>(m.origin_x() + lx),
                     static_cast<double>(m.origin_y() + ly)};
        const Vec2 d = p - centroid;
        if (d.x * d.x + d.y * d.y < best) {
          best = d.x * d.x + d.y * d.y;
          c = p;
        }
      }
    }
  }
  out.push_back({c, id, true});
  return out;
}

}  // namespace flowtrack
