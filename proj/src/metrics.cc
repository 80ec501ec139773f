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

#include "flowtrack/metrics.h"

#include <algorithm>

#include <fmt/format.h>

#include "flowtrack/assignment.h"
#include "flowtrack/association.h"

namespace flowtrack {
namespace {

// Exceeds any sum of admissible costs, so fewer inadmissible pairs always win.
constexpr double kForbidden = 1e6;

const std::vector<TrackBox>& FrameOf(const TrackSet& set, int f) {
  static const std::vector<TrackBox> kEmpty;
  return f < static_cast<int>(set.size()) ? set[f] : kEmpty;
}

}  // namespace

std::vector<std::pair<int, int>> FrameMatch(
    std::span<const TrackBox> gt, std::span<const TrackBox> pred,
    const std::map<TrackletId, TrackletId>& last_match, double iou_threshold) {
  std::vector<std::pair<int, int>> pairs;
  std::vector<bool> gt_used(gt.size(), false), pred_used(pred.size(), false);

  for (std::size_t g = 0; g < gt.size(); ++g) {
    const auto it = last_match.find(gt[g].id);
    if (it == last_match.end()) continue;
    for (std::size_t p = 0; p < pred.size(); ++p) {
      if (pred_used[p] || pred[p].id != it->second) continue;
      if (Iou(gt[g].box, pred[p].box) >= iou_threshold) {
        gt_used[g] = pred_used[p] = true;
        pairs.emplace_back(static_cast<int>(g), static_cast<int>(p));
      }
      break;
    }
  }

  std::vector<int> rows, cols;
  for (std::size_t g = 0; g < gt.size(); ++g) {
    if (!gt_used[g]) rows.push_back(static_cast<int>(g));
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!pred_used[p]) cols.push_back(static_cast<int>(p));
  }
  if (rows.empty() || cols.empty()) return pairs;

  CostMatrix cost(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (int r = 0; r < cost.rows; ++r) {
    for (int c = 0; c < cost.cols; ++c) {
      const double iou = Iou(gt[rows[r]].box, pred[cols[c]].box);
      cost.at(r, c) = iou >= iou_threshold ? 1.0 - iou : kForbidden;
    }
  }
  const auto assigned = SolveAssignment(cost);
  for (int r = 0; r < cost.rows; ++r) {
    const int c = assigned[r];
    if (c >= 0 && cost.at(r, c) < kForbidden) pairs.emplace_back(rows[r], cols[c]);
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

void ComputeMota(const TrackSet& gt, const TrackSet& pred, EvalReport& report) {
  const int frames = static_cast<int>(std::max(gt.size(), pred.size()));
  report.frames = frames;
  report.gt_count = report.pred_count = report.matches = 0;
  report.fp = report.fn = report.idsw = 0;
  std::map<TrackletId, TrackletId> last_match;
  for (int f = 0; f < frames; ++f) {
    const auto& g = FrameOf(gt, f);
    const auto& p = FrameOf(pred, f);
    const auto pairs = FrameMatch(g, p, last_match);
    report.gt_count += static_cast<std::int64_t>(g.size());
    report.pred_count += static_cast<std::int64_t>(p.size());
    report.matches += static_cast<std::int64_t>(pairs.size());
    report.fn += static_cast<std::int64_t>(g.size() - pairs.size());
    report.fp += static_cast<std::int64_t>(p.size() - pairs.size());
    for (const auto& [gi, pi] : pairs) {
      const auto it = last_match.find(g[gi].id);
      if (it != last_match.end() && it->second != p[pi].id) ++report.idsw;
      last_match[g[gi].id] = p[pi].id;
    }
  }
  const double errors = static_cast<double>(report.fn + report.fp + report.idsw);
  report.mota = report.gt_count > 0
                    ? 1.0 - errors / static_cast<double>(report.gt_count)
                    : 1.0 - errors;
}

void ComputeIdf1(const TrackSet& gt, const TrackSet& pred, EvalReport& report) {
  std::map<TrackletId, int> gt_index, pred_index;
  std::int64_t gt_boxes = 0, pred_boxes = 0;
  for (const auto& frame : gt) {
    for (const auto& b : frame) gt_index.emplace(b.id, 0);
    gt_boxes += static_cast<std::int64_t>(frame.size());
  }
  for (const auto& frame : pred) {
    for (const auto& b : frame) pred_index.emplace(b.id, 0);
    pred_boxes += static_cast<std::int64_t>(frame.size());
  }
  int next = 0;
  for (auto& [id, idx] : gt_index) idx = next++;
  next = 0;
  for (auto& [id, idx] : pred_index) idx = next++;

  const int ng = static_cast<int>(gt_index.size());
  const int np = static_cast<int>(pred_index.size());
  std::vector<std::int64_t> colocated(static_cast<std::size_t>(ng) * np, 0);
  const int frames = static_cast<int>(std::min(gt.size(), pred.size()));
  for (int f = 0; f < frames; ++f) {
    for (const auto& g : gt[f]) {
      for (const auto& p : pred[f]) {
        if (Iou(g.box, p.box) >= kMatchIouThreshold) {
          ++colocated[static_cast<std::size_t>(gt_index[g.id]) * np +
                      pred_index[p.id]];
        }
      }
    }
  }

  std::int64_t idtp = 0;
  if (ng > 0 && np > 0) {
    CostMatrix cost(ng, np);
    for (int g = 0; g < ng; ++g) {
      for (int p = 0; p < np; ++p) {
        cost.at(g, p) = -static_cast<double>(
            colocated[static_cast<std::size_t>(g) * np + p]);
      }
    }
    const auto assigned = SolveAssignment(cost);
    for (int g = 0; g < ng; ++g) {
      if (assigned[g] >= 0) {
        idtp += colocated[static_cast<std::size_t>(g) * np + assigned[g]];
      }
    }
  }
  report.idtp = idtp;
  report.idfp = pred_boxes - idtp;
  report.idfn = gt_boxes - idtp;
  const std::int64_t denom = 2 * idtp + report.idfp + report.idfn;
  report.idf1 = denom > 0 ? 2.0 * static_cast<double>(idtp) / denom : 1.0;
}

EvalReport Evaluate(const TrackSet& gt, const TrackSet& pred, std::string name) {
  EvalReport report;
  report.name = std::move(name);
  ComputeMota(gt, pred, report);
  ComputeIdf1(gt, pred, report);
  return report;
}

std::string FormatReport(const EvalReport& r) {
  std::string out;
  auto line = [&out](std::string_view key, const std::string& value) {
    out += fmt::format("{:<10} {}\n", key, value);
  };
  line("sequence", r.name);
  line("frames", std::to_string(r.frames));
  line("MOTA", fmt::format("{:.4f}", r.mota));
  line("IDF1", fmt::format("{:.4f}", r.idf1));
  line("GT", std::to_string(r.gt_count));
  line("PRED", std::to_string(r.pred_count));
  line("FP", std::to_string(r.fp));
  line("FN", std::to_string(r.fn));
  line("IDSW", std::to_string(r.idsw));
  line("IDTP", std::to_string(r.idtp));
  line("IDFP", std::to_string(r.idfp));
  line("IDFN", std::to_string(r.idfn));
  return out;
}

std::string ReportCsvHeader() {
  return "sequence,frames,mota,idf1,gt,pred,fp,fn,idsw,idtp,idfp,idfn";
}

std::string ReportCsvRow(const EvalReport& r) {
  return fmt::format("{},{},{:.4f},{:.4f},{},{},{},{},{},{},{},{}", r.name,
                     r.frames, r.mota, r.idf1, r.gt_count, r.pred_count, r.fp,
                     r.fn, r.idsw, r.idtp, r.idfp, r.idfn);
}

}  // namespace flowtrack
