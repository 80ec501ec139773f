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

#include "flowtrack/association.h"

#include <algorithm>
#include <tuple>

namespace flowtrack {
namespace {

// Absorbs rounding in the accumulated sums before threshold comparisons.
constexpr double kThresholdSlack = 1e-9;

}  // namespace

double Iou(const BoundingBox& a, const BoundingBox& b) {
  const double inter = IntersectionArea(a, b);
  if (inter <= 0.0) return 0.0;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double PoaIndex(std::span<const TrackPoint> points, const InstanceMask& mask) {
  int alive = 0, inside = 0;
  for (const auto& p : points) {
    if (!p.alive) continue;
    ++alive;
    if (MaskContains(mask, p.pos)) ++inside;
  }
  return alive == 0 ? 0.0 : static_cast<double>(inside) / alive;
}

std::optional<double> MatchScore(const Tracklet& t, const Detection& d,
                                 const PipelineConfig& cfg) {
  if (!t.live() || t.class_id != d.class_id) return std::nullopt;
  if (d.mask && t.AlivePointCount() > 0) {
    const double poa = PoaIndex(t.points, *d.mask);
    if (poa < cfg.poa_threshold) return std::nullopt;
    return poa;
  }
  const double iou = Iou(t.box, d.box);
  if (iou < cfg.iou_gate || iou <= 0.0) return std::nullopt;
  return iou;
}

MatchResult MatchDetections(std::span<const Tracklet> tracklets,
                            std::span<const Detection> detections,
                            const PipelineConfig& cfg) {
  struct Candidate {
    double score;
    TrackletId tid;
    int det;
  };
  std::vector<Candidate> cands;
  for (const auto& t : tracklets) {
    for (int j = 0; j < static_cast<int>(detections.size()); ++j) {
      if (auto s = MatchScore(t, detections[j], cfg)) cands.push_back({*s, t.id, j});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(b.score, a.tid, a.det) < std::tie(a.score, b.tid, b.det);
  });

  MatchResult result;
  std::vector<TrackletId> used_t;
  std::vector<bool> used_d(detections.size(), false);
  for (const auto& c : cands) {
    if (used_d[c.det] ||
        std::find(used_t.begin(), used_t.end(), c.tid) != used_t.end()) {
      continue;
    }
    used_d[c.det] = true;
    used_t.push_back(c.tid);
    result.pairs.emplace_back(c.tid, c.det);
  }
  for (int j = 0; j < static_cast<int>(detections.size()); ++j) {
    if (!used_d[j]) result.unmatched_detections.push_back(j);
  }
  for (const auto& t : tracklets) {
    if (t.live() && std::find(used_t.begin(), used_t.end(), t.id) == used_t.end()) {
      result.unmatched_tracklets.push_back(t.id);
    }
  }
  return result;
}

void UpdateConfidence(Tracklet& t, bool probed,
                      std::optional<double> matched_confidence,
                      const PipelineConfig& cfg) {
  if (!probed || !t.live()) return;
  const double evidence = matched_confidence.value_or(0.0);
  t.confidence = std::clamp(
      t.confidence + evidence - cfg.conf_required_per_detection,
      kConfidenceFloor, kConfidenceCeiling);
  if (t.confidence <= cfg.conf_terminate_threshold + kThresholdSlack) {
    TransitionTo(t, TrackletState::kTerminated);
  } else if (t.state == TrackletState::kSpurious &&
             t.confidence >= cfg.conf_validate_threshold - kThresholdSlack) {
    TransitionTo(t, TrackletState::kConfident);
  }
}

std::optional<Vec2> PredictBoxShift(std::span<TrackPoint> points,
                                    std::span<const FlowResult> flows) {
  Vec2 sum;
  int n = 0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!points[i].alive) continue;
    if (i >= flows.size() || !flows[i].converged) {
      points[i].alive = false;
      continue;
    }
    sum += flows[i].displacement;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return (1.0 / n) * sum;
}

bool ResamplePoints(Tracklet& t, const Detection& det, const ImageBuffer& gray,
                    int frame_index, const PipelineConfig& cfg) {
  if (!det.mask) return false;
  if (t.AlivePointCount() > 0 &&
      PoaIndex(t.points, *det.mask) < cfg.mask_containment_fraction) {
    return false;
  }
  t.points = SelectTrackPoints(gray, *det.mask, cfg.points_per_instance, t.id,
                               cfg.harris_k);
  t.box = det.box;
  t.last_redetect_frame = frame_index;
  t.needs_redetect = false;
  return true;
}

std::optional<Tracklet> SpawnTracklet(const Detection& det,
                                      const ImageBuffer& gray,
                                      const PipelineConfig& cfg,
                                      IdAllocator& ids, int frame_index) {
  if (!det.mask) return std::nullopt;
  Tracklet t;
  t.id = ids.Next();
  t.class_id = det.class_id;
  t.box = det.box;
  t.confidence = std::clamp(det.confidence - cfg.conf_required_per_detection,
                            kConfidenceFloor, kConfidenceCeiling);
  t.state = TrackletState::kSpurious;
  t.birth_frame = frame_index;
  t.last_redetect_frame = frame_index;
  t.points = SelectTrackPoints(gray, *det.mask, cfg.points_per_instance, t.id,
                               cfg.harris_k);
  return t;
}

}  // namespace flowtrack
