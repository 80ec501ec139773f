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

#ifndef FLOWTRACK_SLICER_H_
#define FLOWTRACK_SLICER_H_

#include <span>
#include <utility>
#include <vector>

#include "flowtrack/config.h"
#include "flowtrack/core.h"

namespace flowtrack {

enum class WindowClass { kBackground = 0, kEdge = 1, kInstance = 2 };

const char* ToString(WindowClass klass);

struct Window {
  int index = 0;
  BoundingBox rect;  // integer-aligned, inside the frame
  WindowClass klass = WindowClass::kBackground;
  int probes = 0;
  int last_probe_frame = 0;
  // Jumps the queue on the next schedule; cleared once probed.
  bool urgent = false;
};

using Schedule = std::vector<int>;

// Window origins along one axis: multiples of the stride while the window
// still fits, then one final origin at length - window (or a single clipped
// window when the axis is shorter than the window).
std::vector<int> SliceAxis(int length, int window_size, int stride);

// Row-major grid with stride floor(window_size * (1 - overlap)). Throws
// std::invalid_argument for non-positive dims or window size.
std::vector<Window> SliceGrid(int frame_w, int frame_h, int window_size,
                              double overlap_ratio);

// Instance if the rect intersects a live tracklet box, else Edge if it
// touches the frame border, else Background.
void ClassifyWindows(std::vector<Window>& windows,
                     std::span<const Tracklet> tracklets, int frame_w,
                     int frame_h);

// Urgency = (frame_index - last_probe_frame) x boost. Urgent windows outrank
// everything; ties go to the lower index. Marks the chosen windows probed.
Schedule NextWindows(std::vector<Window>& windows, int frame_index,
                     const PipelineConfig& cfg);

double WindowUrgency(const Window& w, int frame_index,
                     const PipelineConfig& cfg);

// Greedy confidence-descending NMS: a detection is dropped when its IoU with
// an already kept one exceeds the threshold. Stable for equal confidences.
std::vector<Detection> SuppressDuplicates(std::vector<Detection> detections,
                                          double iou_threshold = 0.5);

// Shifts window-local detections into frame coordinates (masks included),
// concatenates in window-index order and suppresses cross-window duplicates.
std::vector<Detection> MergeWindowDetections(
    std::vector<std::pair<Window, std::vector<Detection>>> per_window,
    double iou_threshold = 0.5);

}  // namespace flowtrack

#endif  // FLOWTRACK_SLICER_H_
