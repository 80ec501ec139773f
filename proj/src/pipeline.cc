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

#include "flowtrack/pipeline.h"

#include <algorithm>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "flowtrack/association.h"

namespace flowtrack {
namespace {

class StageTimer {
 public:
  StageTimer(FrameResult& result, Stage stage) : result_(result), stage_(stage) {
    result_.stage_begin[static_cast<int>(stage_)] = Clock::now();
  }
  ~StageTimer() {
    const auto end = Clock::now();
    const int i = static_cast<int>(stage_);
    result_.stage_end[i] = end;
    result_.times.micros[i] += std::chrono::duration_cast<std::chrono::microseconds>(
                                   end - result_.stage_begin[i])
                                   .count();
  }

 private:
  FrameResult& result_;
  Stage stage_;
};

LkParams LkParamsFrom(const PipelineConfig& cfg) {
  LkParams p;
  p.window_radius = cfg.lk_window_radius;
  p.max_iterations = cfg.lk_max_iterations;
  p.epsilon = cfg.lk_epsilon;
  return p;
}

Pyramid FramePyramid(const ImageBuffer& gray, const PipelineConfig& cfg) {
  return BuildPyramid(gray, cfg.pyramid_levels, 2 * cfg.lk_window_radius + 1);
}

std::vector<Tracklet> LiveTracklets(const PipelineState& state) {
  std::vector<Tracklet> out;
  out.reserve(state.tracklets.size());
  for (const auto& [id, t] : state.tracklets) out.push_back(t);
  return out;
}

void EmitRows(const PipelineState& state, FrameResult& result) {
  for (const auto& [id, t] : state.tracklets) {
    result.rows.push_back({id, t.class_id, t.box, t.confidence,
                           t.state == TrackletState::kConfident ? 1 : 0});
  }
}

std::vector<Detection> ProbeWindows(const PipelineState& state,
                                    const ImageBuffer& frame,
                                    const std::vector<int>& schedule,
                                    Detector& detector, int frame_index) {
  std::vector<std::pair<Window, std::vector<Detection>>> per_window;
  per_window.reserve(schedule.size());
  for (int w : schedule) {
    const Window& win = state.windows[w];
    per_window.emplace_back(
        win, detector.Detect({frame, win.rect, frame_index, win.index}));
  }
  return MergeWindowDetections(std::move(per_window));
}

}  // namespace

const char* ToString(Stage s) {
  switch (s) {
    case Stage::kGrayscale: return "grayscale";
    case Stage::kPyramid: return "pyramid";
    case Stage::kLk: return "lk";
    case Stage::kDetect: return "detect";
    case Stage::kAssociate: return "associate";
  }
  return "unknown";
}

std::int64_t StageTimes::total() const {
  std::int64_t sum = 0;
  for (auto m : micros) sum += m;
  return sum;
}

StageTimes& StageTimes::operator+=(const StageTimes& o) {
  for (int i = 0; i < kStageCount; ++i) micros[i] += o.micros[i];
  return *this;
}

int MinimumFrameSide(const PipelineConfig& cfg) {
  return (2 * cfg.lk_window_radius + 1) << cfg.pyramid_levels;
}

PipelineState InitTracking(const ImageBuffer& frame0, Detector* detector,
                           const PipelineConfig& cfg, FrameResult* result) {
  Validate(cfg);
  FrameResult local;
  FrameResult& res = result ? *result : local;
  res = FrameResult{};
  res.frame_index = 0;

  PipelineState state;
  state.config = cfg;
  state.frame_index = 0;
  state.frame_width = frame0.width();
  state.frame_height = frame0.height();

  ImageBuffer gray;
  {
    StageTimer timer(res, Stage::kGrayscale);
    gray = frame0.channels() == 1 ? frame0 : ToGrayscale(frame0);
  }
  {
    StageTimer timer(res, Stage::kPyramid);
    state.prev_pyramid = FramePyramid(gray, cfg);
  }
  state.windows = SliceGrid(frame0.width(), frame0.height(), cfg.window_size,
                            cfg.window_overlap_ratio);

  std::vector<Detection> detections;
  {
    StageTimer timer(res, Stage::kDetect);
    if (detector) {
      std::vector<int> all(state.windows.size());
      for (std::size_t i = 0; i < all.size(); ++i) {
        all[i] = static_cast<int>(i);
        state.windows[i].probes = 1;
        state.windows[i].last_probe_frame = 0;
      }
      detections = ProbeWindows(state, frame0, all, *detector, 0);
      res.probed_windows = std::move(all);
    }
  }
  {
    StageTimer timer(res, Stage::kAssociate);
    res.detections = static_cast<int>(detections.size());
    for (const auto& det : detections) {
      if (auto t = SpawnTracklet(det, gray, cfg, state.ids, 0)) {
        state.tracklets.emplace(t->id, std::move(*t));
        ++res.spawned;
      }
    }
    const auto live = LiveTracklets(state);
    ClassifyWindows(state.windows, live, state.frame_width, state.frame_height);
  }
  state.timing += res.times;
  EmitRows(state, res);
  return state;
}

FrameResult Step(PipelineState& state, const ImageBuffer& frame,
                 Detector* detector) {
  if (frame.width() != state.frame_width || frame.height() != state.frame_height) {
    throw std::invalid_argument(fmt::format(
        "frame size {}x{} differs from the sequence size {}x{}", frame.width(),
        frame.height(), state.frame_width, state.frame_height));
  }
  const PipelineConfig& cfg = state.config;
  const int t_index = state.frame_index + 1;
  FrameResult res;
  res.frame_index = t_index;

  ImageBuffer gray;
  Pyramid pyramid;
  {
    StageTimer timer(res, Stage::kGrayscale);
    gray = frame.channels() == 1 ? frame : ToGrayscale(frame);
  }
  {
    StageTimer timer(res, Stage::kPyramid);
    pyramid = FramePyramid(gray, cfg);
  }

  {
    StageTimer timer(res, Stage::kLk);
    std::vector<Vec2> points;
    for (const auto& [id, t] : state.tracklets) {
      for (const auto& p : t.points) {
        if (p.alive) points.push_back(p.pos);
      }
    }
    const auto flows =
        TrackPointsLk(state.prev_pyramid, pyramid, points, LkParamsFrom(cfg));
    std::size_t cursor = 0;
    for (auto& [id, t] : state.tracklets) {
      // Flows for this tracklet's points, dead points padded with failures.
      std::vector<FlowResult> mine(t.points.size());
      for (std::size_t i = 0; i < t.points.size(); ++i) {
        if (t.points[i].alive) mine[i] = flows[cursor++];
      }
      const auto shift = PredictBoxShift(t.points, mine);
      if (!shift) {
        t.needs_redetect = true;
        continue;
      }
      for (std::size_t i = 0; i < t.points.size(); ++i) {
        if (t.points[i].alive) t.points[i].pos += mine[i].displacement;
      }
      t.box = TranslateBox(t.box, *shift);
    }
  }

  std::vector<Detection> detections;
  bool probed = false;
  {
    StageTimer timer(res, Stage::kDetect);
    const auto live = LiveTracklets(state);
    ClassifyWindows(state.windows, live, state.frame_width, state.frame_height);
    for (const auto& t : live) {
      if (!t.needs_redetect) continue;
      const Vec2 c = BoxCenter(t.box);
      const Vec2 clamped{std::clamp(c.x, 0.0, state.frame_width - 1.0),
                         std::clamp(c.y, 0.0, state.frame_height - 1.0)};
      for (auto& w : state.windows) {
        if (BoxContains(w.rect, clamped)) {
          w.urgent = true;
          w.klass = WindowClass::kInstance;
          break;
        }
      }
    }
    if (detector) {
      const Schedule schedule = NextWindows(state.windows, t_index, cfg);
      res.probed_windows = schedule;
      try {
        detections = ProbeWindows(state, frame, schedule, *detector, t_index);
        probed = true;
      } catch (const DetectorError& e) {
        res.degraded = true;
        res.degradation = e.what();
        ++state.degraded_frames;
      }
    }
  }

  {
    StageTimer timer(res, Stage::kAssociate);
    if (probed) {
      res.detections = static_cast<int>(detections.size());
      std::vector<BoundingBox> rects;
      for (int w : res.probed_windows) rects.push_back(state.windows[w].rect);
      auto touches = [&](const BoundingBox& box) {
        return std::any_of(rects.begin(), rects.end(), [&](const BoundingBox& r) {
          return Intersects(r, box);
        });
      };
      auto centred = [&](const BoundingBox& box) {
        const Vec2 c = BoxCenter(box);
        return std::any_of(rects.begin(), rects.end(), [&](const BoundingBox& r) {
          return BoxContains(r, c);
        });
      };

      std::vector<Tracklet> candidates;
      for (const auto& [id, t] : state.tracklets) {
        if (touches(t.box)) candidates.push_back(t);
      }
      const MatchResult match = MatchDetections(candidates, detections, cfg);
      for (const auto& [id, d] : match.pairs) {
        Tracklet& t = state.tracklets.at(id);
        const bool kept = ResamplePoints(t, detections[d], gray, t_index, cfg);
        UpdateConfidence(t, true,
                         kept ? std::optional<double>(detections[d].confidence)
                              : std::nullopt,
                         cfg);
      }
      for (TrackletId id : match.unmatched_tracklets) {
        Tracklet& t = state.tracklets.at(id);
        if (centred(t.box)) UpdateConfidence(t, true, std::nullopt, cfg);
      }
      for (int d : match.unmatched_detections) {
        if (auto t = SpawnTracklet(detections[d], gray, cfg, state.ids, t_index)) {
          state.tracklets.emplace(t->id, std::move(*t));
          ++res.spawned;
        }
      }
      for (auto it = state.tracklets.begin(); it != state.tracklets.end();) {
        if (!it->second.live()) {
          it = state.tracklets.erase(it);
          ++res.terminated;
        } else {
          ++it;
        }
      }
      state.terminated_total += res.terminated;
    }
  }

  EmitRows(state, res);
  state.prev_pyramid = std::move(pyramid);
  state.frame_index = t_index;
  state.timing += res.times;
  return res;
}

void ResultCollector::Add(const FrameResult& result) {
  std::set<TrackletId> present;
  for (const auto& r : result.rows) {
    present.insert(r.id);
    MotRow row;
    row.frame = result.frame_index;
    row.id = r.id;
    row.box = r.box;
    row.conf = r.confidence;
    row.class_id = r.class_id;
    if (r.label == 1) {
      if (auto it = pending_.find(r.id); it != pending_.end()) {
        rows_.insert(rows_.end(), it->second.begin(), it->second.end());
        pending_.erase(it);
      }
      rows_.push_back(row);
    } else if (backfill_) {
      pending_[r.id].push_back(row);
    }
  }
  for (auto it = pending_.begin(); it != pending_.end();) {
    it = present.count(it->first) ? std::next(it) : pending_.erase(it);
  }
}

std::vector<MotRow> ResultCollector::rows() const {
  std::vector<MotRow> out = rows_;
  std::stable_sort(out.begin(), out.end(), [](const MotRow& a, const MotRow& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.id < b.id;
  });
  return out;
}

RunSummary Run(const FrameSource& source, Detector* detector,
               const PipelineConfig& cfg, const FrameSink& sink) {
  std::optional<ImageBuffer> frame = source();
  if (!frame) throw std::invalid_argument("the frame source is empty");
  RunSummary summary;
  Clock::duration busy{};

  FrameResult result;
  auto start = Clock::now();
  PipelineState state = InitTracking(*frame, detector, cfg, &result);
  busy += Clock::now() - start;
  if (sink) sink(result);
  summary.frames = 1;

  while ((frame = source())) {
    start = Clock::now();
    result = Step(state, *frame, detector);
    busy += Clock::now() - start;
    if (sink) sink(result);
    ++summary.frames;
  }

  summary.seconds = std::chrono::duration<double>(busy).count();
  summary.fps = summary.seconds > 0.0 ? summary.frames / summary.seconds : 0.0;
  summary.stage_totals = state.timing;
  summary.tracklets_spawned = state.ids.peek() - 1;
  summary.tracklets_live = static_cast<int>(state.tracklets.size());
  for (const auto& [id, t] : state.tracklets) {
    if (t.state == TrackletState::kConfident) ++summary.tracklets_confident;
  }
  summary.tracklets_terminated = state.terminated_total;
  summary.degraded_frames = state.degraded_frames;
  return summary;
}

std::string FormatTiming(const RunSummary& s) {
  std::string out = fmt::format(
      "frames = {}\nseconds = {:.6f}\nfps = {:.4f}\n", s.frames, s.seconds, s.fps);
  for (int i = 0; i < kStageCount; ++i) {
    out += fmt::format("stage.{}_ms = {:.3f}\n", ToString(static_cast<Stage>(i)),
                       s.stage_totals.micros[i] / 1000.0);
  }
  out += fmt::format(
      "tracklets.spawned = {}\ntracklets.live = {}\ntracklets.confident = {}\n"
      "tracklets.terminated = {}\ndegraded_frames = {}\n",
      s.tracklets_spawned, s.tracklets_live, s.tracklets_confident,
      s.tracklets_terminated, s.degraded_frames);
  return out;
}

}  // namespace flowtrack
