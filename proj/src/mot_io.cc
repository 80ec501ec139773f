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

#include "flowtrack/mot_io.h"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "flowtrack/image_io.h"
#include "flowtrack/rle.h"

namespace flowtrack {
namespace fs = std::filesystem;
namespace {

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double ParseField(std::string_view f, int line) {
  std::string s(Trim(f));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    throw MotFormatError(
        fmt::format("line {}: bad numeric field '{}'", line, s), line);
  }
  return v;
}

template <typename Fn>
void ForEachLine(std::string_view text, Fn&& fn) {
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    fn(Trim(text.substr(0, nl)), line_no);
    if (nl == std::string_view::npos) break;
    text = text.substr(nl + 1);
  }
}

int SiblingManifestFrames(const fs::path& gt_csv) {
  const fs::path manifest = gt_csv.parent_path() / "manifest.txt";
  std::error_code ec;
  if (!fs::exists(manifest, ec)) return 0;
  int frames = 0;
  ForEachLine(ReadTextFile(manifest), [&](std::string_view line, int) {
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) return;
    if (Trim(line.substr(0, eq)) == "frames") {
      try {
        frames = std::stoi(std::string(Trim(line.substr(eq + 1))));
      } catch (const std::exception&) {
        frames = 0;
      }
    }
  });
  return frames;
}

}  // namespace

const std::vector<GtInstance>& GroundTruthStore::at(int frame) const {
  if (frame < 0 || frame >= frame_count()) {
    throw std::out_of_range(fmt::format(
        "unknown frame index {} (store holds {} frames)", frame, frame_count()));
  }
  return frames_[frame];
}

std::vector<GtInstance>& GroundTruthStore::mutable_frame(int frame) {
  if (frame < 0) throw std::out_of_range("negative frame index");
  if (frame >= frame_count()) frames_.resize(frame + 1);
  return frames_[frame];
}

std::string FormatNumber(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    return fmt::format("{}", static_cast<long long>(v));
  }
  return fmt::format("{}", v);
}

std::vector<MotRow> ParseMotCsv(std::string_view text) {
  std::vector<MotRow> rows;
  ForEachLine(text, [&](std::string_view line, int line_no) {
    if (line.empty() || line.front() == '#') return;
    std::vector<std::string_view> fields;
    while (true) {
      const auto comma = line.find(',');
      fields.push_back(line.substr(0, comma));
      if (comma == std::string_view::npos) break;
      line = line.substr(comma + 1);
    }
    if (fields.size() < 6) {
      throw MotFormatError(
          fmt::format("line {}: expected at least 6 columns, got {}", line_no,
                      fields.size()),
          line_no);
    }
    std::vector<double> v;
    for (const auto& f : fields) v.push_back(ParseField(f, line_no));
    if (v[0] < 1 || v[0] != std::floor(v[0])) {
      throw MotFormatError(
          fmt::format("line {}: frame must be a positive integer", line_no),
          line_no);
    }
    if (!(v[4] > 0.0) || !(v[5] > 0.0)) {
      throw MotFormatError(
          fmt::format("line {}: box width/height must be positive", line_no),
          line_no);
    }
    MotRow row;
    row.frame = static_cast<int>(v[0]) - 1;
    row.id = static_cast<TrackletId>(v[1]);
    row.box = {v[2], v[3], v[4], v[5]};
    if (v.size() > 6) row.conf = v[6];
    if (v.size() > 7) row.class_id = static_cast<int>(v[7]);
    if (v.size() > 8) row.visibility = v[8];
    rows.push_back(row);
  });
  return rows;
}

std::vector<MotRow> LoadMotCsv(const fs::path& path) {
  const std::string text = ReadTextFile(path);
  try {
    return ParseMotCsv(text);
  } catch (const MotFormatError& e) {
    throw MotFormatError(fmt::format("{}: {}", path.string(), e.what()),
                         e.line());
  }
}

GroundTruthStore GroundTruthFromRows(const std::vector<MotRow>& rows,
                                     int frame_count) {
  int frames = frame_count;
  for (const auto& r : rows) frames = std::max(frames, r.frame + 1);
  GroundTruthStore store(frames);
  for (const auto& r : rows) {
    store.mutable_frame(r.frame).push_back(
        {r.id, std::max(r.class_id, 0), r.box, std::nullopt});
  }
  return store;
}

GroundTruthStore LoadGroundTruth(const fs::path& gt_csv) {
  GroundTruthStore store =
      GroundTruthFromRows(LoadMotCsv(gt_csv), SiblingManifestFrames(gt_csv));
  const fs::path mask_dir = gt_csv.parent_path() / "masks";
  std::error_code ec;
  if (!fs::is_directory(mask_dir, ec)) return store;
  for (int f = 0; f < store.frame_count(); ++f) {
    const fs::path file = mask_dir / fmt::format("{:06d}.txt", f + 1);
    if (!fs::exists(file, ec)) continue;
    auto& instances = store.mutable_frame(f);
    ForEachLine(ReadTextFile(file), [&](std::string_view line, int line_no) {
      if (line.empty()) return;
      const auto sp = line.find(' ');
      if (sp == std::string_view::npos) {
        throw MotFormatError(fmt::format("{}: line {}: expected '<id> <rle>'",
                                         file.string(), line_no),
                             line_no);
      }
      const auto id =
          static_cast<TrackletId>(ParseField(line.substr(0, sp), line_no));
      auto it = std::find_if(instances.begin(), instances.end(),
                             [&](const GtInstance& g) { return g.id == id; });
      if (it == instances.end()) {
        throw MotFormatError(
            fmt::format("{}: line {}: mask for unknown id {}", file.string(),
                        line_no, id),
            line_no);
      }
      try {
        it->mask = ParseMaskRle(Trim(line.substr(sp + 1)),
                                static_cast<int>(std::floor(it->box.x)),
                                static_cast<int>(std::floor(it->box.y)));
      } catch (const RleError& e) {
        throw MotFormatError(
            fmt::format("{}: line {}: {}", file.string(), line_no, e.what()),
            line_no);
      }
    });
  }
  return store;
}

std::string FormatGroundTruthCsv(const GroundTruthStore& store) {
  std::string out;
  for (int f = 0; f < store.frame_count(); ++f) {
    for (const auto& g : store.at(f)) {
      out += fmt::format("{},{},{},{},{},{},1,{},1\n", f + 1, g.id,
                         FormatNumber(g.box.x), FormatNumber(g.box.y),
                         FormatNumber(g.box.w), FormatNumber(g.box.h),
                         g.class_id);
    }
  }
  return out;
}

std::string FormatMaskFile(const std::vector<GtInstance>& instances) {
  std::string out;
  for (const auto& g : instances) {
    if (!g.mask) continue;
    out += fmt::format("{} {}\n", g.id, EncodeMaskRle(*g.mask));
  }
  return out;
}

std::string FormatResultCsv(const std::vector<MotRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += fmt::format("{},{},{:.2f},{:.2f},{:.2f},{:.2f},{:.4f},-1,-1,-1\n",
                       r.frame + 1, r.id, r.box.x, r.box.y, r.box.w, r.box.h,
                       r.conf);
  }
  return out;
}

TrackSet ToTrackSet(const GroundTruthStore& store) {
  TrackSet set(store.frame_count());
  for (int f = 0; f < store.frame_count(); ++f) {
    for (const auto& g : store.at(f)) set[f].push_back({g.id, g.box});
  }
  return set;
}

TrackSet ToTrackSet(const std::vector<MotRow>& rows, int frame_count) {
  int frames = frame_count;
  for (const auto& r : rows) frames = std::max(frames, r.frame + 1);
  TrackSet set(frames);
  for (const auto& r : rows) set[r.frame].push_back({r.id, r.box});
  return set;
}

}  // namespace flowtrack
