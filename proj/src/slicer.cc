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

#include "flowtrack/slicer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

#include "flowtrack/association.h"

namespace flowtrack {

const char* ToString(WindowClass klass) {
  switch (klass) {
    case WindowClass::kBackground:
      return "background";
    case WindowClass::kEdge:
      return "edge";
    case WindowClass::kInstance:
      return "instance";
  }
  return "unknown";
}

std::vector<int> SliceAxis(int length, int window_size, int stride) {
  if (length <= window_size) return {0};
  std::vector<int> origins;
  for (int pos = 0; pos + window_size < length; pos += stride) {
    origins.push_back(pos);
  }
  origins.push_back(length - window_size);
  return origins;
}

std::vector<Window> SliceGrid(int frame_w, int frame_h, int window_size,
                              double overlap_ratio) {
  if (frame_w < 1 || frame_h < 1 || window_size < 1) {
    throw std::invalid_argument(fmt::format(
        "cannot slice {}x{} frame with window {}", frame_w, frame_h,
        window_size));
  }
  if (!(overlap_ratio >= 0.0 && overlap_ratio < 1.0)) {
    throw std::invalid_argument("overlap ratio must lie in [0, 1)");
  }
  const int stride = std::max(
      1, static_cast<int>(std::floor(window_size * (1.0 - overlap_ratio))));
  const auto xs = SliceAxis(frame_w, window_size, stride);
  const auto ys = SliceAxis(frame_h, window_size, stride);
  std::vector<Window> windows;
  for (int y : ys) {
    for (int x : xs) {
      Window w;
      w.index = static_cast<int>(windows.size());
      w.rect = {static_cast<double>(x), static_cast<double>(y),
                static_cast<double>(std::min(window_size, frame_w - x)),
                static_cast<double>(std::min(window_size, frame_h - y))};
      windows.push_back(w);
    }
  }
  return windows;
}

void ClassifyWindows(std::vector<Window>& windows,
                     std::span<const Tracklet> tracklets, int frame_w,
                     int frame_h) {
  for (auto& w : windows) {
    const bool instance =
        std::any_of(tracklets.begin(), tracklets.end(), [&](const Tracklet& t) {
          return t.live() && Intersects(w.rect, t.box);
        });
    const bool edge = w.rect.x <= 0.0 || w.rect.y <= 0.0 ||
                      w.rect.right() >= frame_w || w.rect.bottom() >= frame_h;
    w.klass = instance ? WindowClass::kInstance
              : edge   ? WindowClass::kEdge
                       : WindowClass::kBackground;
  }
}

double WindowUrgency(const Window& w, int frame_index,
                     const PipelineConfig& cfg) {
  if (w.urgent) return std::numeric_limits<double>::infinity();
  int boost = 1;
  if (w.klass == WindowClass::kEdge) boost = cfg.edge_rate_boost;
  if (w.klass == WindowClass::kInstance) boost = cfg.instance_rate_boost;
  return static_cast<double>(frame_index - w.last_probe_frame) * boost;
}

Schedule NextWindows(std::vector<Window>& windows, int frame_index,
                     const PipelineConfig& cfg) {
  std::vector<int> order(windows.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> urgency(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    urgency[i] = WindowUrgency(windows[i], frame_index, cfg);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return urgency[a] > urgency[b]; });
  const std::size_t take =
      std::min<std::size_t>(windows.size(), static_cast<std::size_t>(
                                                std::max(cfg.windows_per_frame, 0)));
  Schedule schedule(order.begin(), order.begin() + take);
  for (int i : schedule) {
    windows[i].last_probe_frame = frame_index;
    windows[i].probes += 1;
    windows[i].urgent = false;
  }
  return schedule;
}

std::vector<Detection> SuppressDuplicates(std::vector<Detection> detections,
                                          double iou_threshold) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detections[a].confidence > detections[b].confidence;
  });
  std::vector<Detection> kept;
  for (std::size_t i : order) {
    const bool dup = std::any_of(kept.begin(), kept.end(), [&](const Detection& k) {
      return Iou(k.box, detections[i].box) > iou_threshold;
    });
    if (!dup) kept.push_back(std::move(detections[i]));
  }
  return kept;
}

std::vector<Detection> MergeWindowDetections(
    std::vector<std::pair<Window, std::vector<Detection>>> per_window,
    double iou_threshold) {
  std::stable_sort(per_window.begin(), per_window.end(),
                   [](const auto& a, const auto& b) {
                     return a.first.index < b.first.index;
                   });
  std::vector<Detection> all;
  for (auto& [window, dets] : per_window) {
    const int ox = static_cast<int>(window.rect.x);
    const int oy = static_cast<int>(window.rect.y);
    for (auto& d : dets) {
      d.box = TranslateBox(d.box, {static_cast<double>(ox), static_cast<double>(oy)});
      if (d.mask) d.mask = d.mask->Translated(ox, oy);
      all.push_back(std::move(d));
    }
  }
  return SuppressDuplicates(std::move(all), iou_threshold);
}

}  // namespace flowtrack
