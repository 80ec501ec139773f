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

// Re-detection association: point-over-area (PoA) and IoU scoring, gated
// greedy matching, the confidence accumulator with its lifecycle, box motion
// from point flow, and point resampling.

#ifndef FLOWTRACK_ASSOCIATION_H_
#define FLOWTRACK_ASSOCIATION_H_

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "flowtrack/config.h"
#include "flowtrack/core.h"
#include "flowtrack/vision.h"

namespace flowtrack {

inline constexpr double kConfidenceFloor = -1.0;
inline constexpr double kConfidenceCeiling = 2.0;

double Iou(const BoundingBox& a, const BoundingBox& b);

// Fraction of alive points inside the mask; 0 when no point is alive.
double PoaIndex(std::span<const TrackPoint> points, const InstanceMask& mask);

struct MatchResult {
  std::vector<std::pair<TrackletId, int>> pairs;  // (tracklet, detection idx)
  std::vector<int> unmatched_detections;
  std::vector<TrackletId> unmatched_tracklets;
};

// Score of one pairing, or nullopt when inadmissible. Masked detections are
// scored by PoA against poa_threshold; maskless detections, and tracklets
// that have lost every point, by box IoU against iou_gate. Class mismatch is
// never admissible.
std::optional<double> MatchScore(const Tracklet& t, const Detection& d,
                                 const PipelineConfig& cfg);

// Greedy by descending score, ties to the lower tracklet id, then the lower
// detection index. Terminated tracklets are ignored.
MatchResult MatchDetections(std::span<const Tracklet> tracklets,
                            std::span<const Detection> detections,
                            const PipelineConfig& cfg);

// Accumulates (detection confidence - c_min) on a match and -c_min on a probe
// without a match, clamps to [-1, 2], then validates or terminates. A frame
// in which the tracklet was not probed leaves it untouched.
void UpdateConfidence(Tracklet& t, bool probed,
                      std::optional<double> matched_confidence,
                      const PipelineConfig& cfg);

// Mean displacement of converged points. Points whose flow failed are marked
// dead. nullopt when no point survives; the caller then freezes the box and
// asks for an urgent re-detection.
std::optional<Vec2> PredictBoxShift(std::span<TrackPoint> points,
                                    std::span<const FlowResult> flows);

// Re-anchors a matched tracklet on its detection. When fewer than
// mask_containment_fraction of its points lie in the new mask the match is
// demoted: nothing changes and false is returned, so the caller counts the
// probe as a miss. Otherwise points are reselected inside the mask, the box
// snaps to the detection and last_redetect_frame is updated.
bool ResamplePoints(Tracklet& t, const Detection& det, const ImageBuffer& gray,
                    int frame_index, const PipelineConfig& cfg);

// New Spurious tracklet for an unmatched detection; nullopt for maskless
// detections, which are dropped.
std::optional<Tracklet> SpawnTracklet(const Detection& det,
                                      const ImageBuffer& gray,
                                      const PipelineConfig& cfg,
                                      IdAllocator& ids, int frame_index);

}  // namespace flowtrack

#endif  // FLOWTRACK_ASSOCIATION_H_
