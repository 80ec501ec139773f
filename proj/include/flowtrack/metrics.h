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

// CLEAR-MOT accuracy (MOTA) and identity F1 (IDF1) over box tracks.

#ifndef FLOWTRACK_METRICS_H_
#define FLOWTRACK_METRICS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "flowtrack/mot_io.h"

namespace flowtrack {

inline constexpr double kMatchIouThreshold = 0.5;

struct EvalReport {
  std::string name;
  int frames = 0;
  std::int64_t gt_count = 0;
  std::int64_t pred_count = 0;
  std::int64_t matches = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t idsw = 0;
  std::int64_t idtp = 0;
  std::int64_t idfp = 0;
  std::int64_t idfn = 0;
  double mota = 0.0;
  double idf1 = 0.0;
};

// Per-frame pairing as (gt index, pred index). `last_match` maps a GT id to
// the prediction id it was last paired with; such pairs are kept first when
// still at IoU >= threshold. The rest are assigned to maximise the number of
// admissible pairs, then to minimise the summed (1 - IoU).
std::vector<std::pair<int, int>> FrameMatch(
    std::span<const TrackBox> gt, std::span<const TrackBox> pred,
    const std::map<TrackletId, TrackletId>& last_match,
    double iou_threshold = kMatchIouThreshold);

// Fills fp, fn, idsw, matches, gt_count, pred_count, frames and mota. With no
// GT boxes at all MOTA is 1 - FP, so an empty-vs-empty evaluation scores 1.
void ComputeMota(const TrackSet& gt, const TrackSet& pred, EvalReport& report);

// Fills idtp, idfp, idfn and idf1 from the identity matching that maximises
// co-located frames. IDF1 is 1 when both sides are empty.
void ComputeIdf1(const TrackSet& gt, const TrackSet& pred, EvalReport& report);

EvalReport Evaluate(const TrackSet& gt, const TrackSet& pred,
                    std::string name = "sequence");

// Aligned `key  value` lines; ratios with four decimals.
std::string FormatReport(const EvalReport& report);
std::string ReportCsvHeader();
std::string ReportCsvRow(const EvalReport& report);

}  // namespace flowtrack

#endif  // FLOWTRACK_METRICS_H_
