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

// Frame loop: full-frame scan on the first frame, then per frame LK point
// propagation, scheduled window probes, association and lifecycle updates.

#ifndef FLOWTRACK_PIPELINE_H_
#define FLOWTRACK_PIPELINE_H_

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flowtrack/config.h"
#include "flowtrack/core.h"
#include "flowtrack/detector.h"
#include "flowtrack/mot_io.h"
#include "flowtrack/slicer.h"
#include "flowtrack/vision.h"

namespace flowtrack {

enum class Stage { kGrayscale = 0, kPyramid, kLk, kDetect, kAssociate };
inline constexpr int kStageCount = 5;
const char* ToString(Stage s);

using Clock = std::chrono::steady_clock;

struct StageTimes {
  std::array<std::int64_t, kStageCount> micros{};

  std::int64_t& operator[](Stage s) { return micros[static_cast<int>(s)]; }
  std::int64_t operator[](Stage s) const { return micros[static_cast<int>(s)]; }
  std::int64_t total() const;
  StageTimes& operator+=(const StageTimes& o);
};

struct OutputRow {
  TrackletId id = 0;
  int class_id = 0;
  BoundingBox box;
  double confidence = 0.0;
  int label = 0;  // 1 confident, 0 spurious
};

struct FrameResult {
  int frame_index = 0;
  std::vector<OutputRow> rows;  // every live tracklet
  StageTimes times;
  std::array<Clock::time_point, kStageCount> stage_begin{};
  std::array<Clock::time_point, kStageCount> stage_end{};
  std::vector<int> probed_windows;
  int detections = 0;
  int spawned = 0;
  int terminated = 0;
  bool degraded = false;
  std::string degradation;
};

struct PipelineState {
  int frame_index = 0;
  int frame_width = 0;
  int frame_height = 0;
  std::map<TrackletId, Tracklet> tracklets;  // live only
  std::vector<Window> windows;
  Pyramid prev_pyramid;
  PipelineConfig config;
  IdAllocator ids;
  StageTimes timing;
  int terminated_total = 0;
  int degraded_frames = 0;
};

// Smallest frame side the LK window needs at the coarsest pyramid level.
int MinimumFrameSide(const PipelineConfig& cfg);

// Probes every window of frame 0 and spawns a Spurious tracklet per merged
// masked detection. Detector errors propagate. ImageTooSmall when the frame
// cannot hold the configured pyramid.
PipelineState InitTracking(const ImageBuffer& frame0, Detector* detector,
                           const PipelineConfig& cfg,
                           FrameResult* result = nullptr);

// One frame. A null detector coasts on LK alone; a throwing detector makes
// the frame coast as well and marks the result degraded.
FrameResult Step(PipelineState& state, const ImageBuffer& frame,
                 Detector* detector);

// Confident rows as MOT result rows. A tracklet's rows from its Spurious
// phase are held back and released once it turns Confident; they are dropped
// if it terminates first. With backfill off, only rows emitted while
// Confident are kept.
class ResultCollector {
 public:
  explicit ResultCollector(bool backfill = true) : backfill_(backfill) {}

  void Add(const FrameResult& result);
  // Sorted by frame, then id.
  std::vector<MotRow> rows() const;

 private:
  bool backfill_;
  std::vector<MotRow> rows_;
  std::map<TrackletId, std::vector<MotRow>> pending_;
};

struct RunSummary {
  int frames = 0;
  double seconds = 0.0;  // init plus steps, frame decoding excluded
  double fps = 0.0;
  StageTimes stage_totals;
  TrackletId tracklets_spawned = 0;
  int tracklets_live = 0;
  int tracklets_confident = 0;
  int tracklets_terminated = 0;
  int degraded_frames = 0;
};

// Yields frames until exhausted.
using FrameSource = std::function<std::optional<ImageBuffer>()>;
using FrameSink = std::function<void(const FrameResult&)>;

RunSummary Run(const FrameSource& source, Detector* detector,
               const PipelineConfig& cfg, const FrameSink& sink = {});

// Key-value timing report.
std::string FormatTiming(const RunSummary& summary);

}  // namespace flowtrack

#endif  // FLOWTRACK_PIPELINE_H_
