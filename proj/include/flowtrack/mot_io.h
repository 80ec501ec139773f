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

// MOTChallenge-style CSV files.
//
//   ground truth: frame,id,bb_left,bb_top,bb_width,bb_height,conf,class,visibility
//   results:      frame,id,bb_left,bb_top,bb_width,bb_height,conf,-1,-1,-1
//
// Frames are 1-based on disk and 0-based in memory. Ground-truth masks live
// in an optional sibling directory `masks/` holding one `%06d.txt` file per
// frame with `<id> <rle>` lines; the RLE extent is anchored at the floored
// top-left corner of the instance box.

#ifndef FLOWTRACK_MOT_IO_H_
#define FLOWTRACK_MOT_IO_H_

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flowtrack/core.h"

namespace flowtrack {

class MotFormatError : public std::runtime_error {
 public:
  MotFormatError(const std::string& what, int line)
      : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct MotRow {
  int frame = 0;  // 0-based
  TrackletId id = 0;
  BoundingBox box;
  double conf = 1.0;
  int class_id = -1;
  double visibility = -1.0;
};

struct GtInstance {
  TrackletId id = 0;
  int class_id = 0;
  BoundingBox box;
  std::optional<InstanceMask> mask;
};

class GroundTruthStore {
 public:
  GroundTruthStore() = default;
  explicit GroundTruthStore(int frame_count) : frames_(frame_count) {}

  int frame_count() const { return static_cast<int>(frames_.size()); }
  // Throws std::out_of_range for an unknown frame index.
  const std::vector<GtInstance>& at(int frame) const;
  std::vector<GtInstance>& mutable_frame(int frame);
  void Resize(int frame_count) { frames_.resize(frame_count); }

 private:
  std::vector<std::vector<GtInstance>> frames_;
};

// Identity/box pairs per frame; the common input of the metrics.
struct TrackBox {
  TrackletId id = 0;
  BoundingBox box;
};
using TrackSet = std::vector<std::vector<TrackBox>>;

// Parses any MOT CSV; requires the first six columns. Blank lines and lines
// starting with '#' are skipped. Throws MotFormatError with the line number.
std::vector<MotRow> ParseMotCsv(std::string_view text);
std::vector<MotRow> LoadMotCsv(const std::filesystem::path& path);

// Ground truth plus sibling masks. The frame count is the largest frame seen,
// or `frames` from a sibling manifest.txt when that is present.
GroundTruthStore LoadGroundTruth(const std::filesystem::path& gt_csv);
GroundTruthStore GroundTruthFromRows(const std::vector<MotRow>& rows,
                                     int frame_count = 0);

std::string FormatGroundTruthCsv(const GroundTruthStore& store);
std::string FormatMaskFile(const std::vector<GtInstance>& instances);
std::string FormatResultCsv(const std::vector<MotRow>& rows);

TrackSet ToTrackSet(const GroundTruthStore& store);
TrackSet ToTrackSet(const std::vector<MotRow>& rows, int frame_count);

// Shortest text that round-trips; integral values print without a fraction.
std::string FormatNumber(double v);

}  // namespace flowtrack

#endif  // FLOWTRACK_MOT_IO_H_
