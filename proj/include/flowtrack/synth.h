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

// Procedural test sequences: textured objects translating over a textured
// background, with exact boxes and masks as ground truth.

#ifndef FLOWTRACK_SYNTH_H_
#define FLOWTRACK_SYNTH_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flowtrack/core.h"
#include "flowtrack/mot_io.h"

namespace flowtrack {

class SceneError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Texture { kNoise, kChecker, kStripes };
enum class Shape { kRectangle, kEllipse };

const char* ToString(Texture t);
const char* ToString(Shape s);

struct SceneObject {
  int class_id = 0;
  int width = 32;
  int height = 32;
  Vec2 start;     // top-left corner at frame 0
  Vec2 velocity;  // px per frame
  Texture texture = Texture::kNoise;
  Shape shape = Shape::kRectangle;
  // Frame index from which the object is gone; nullopt keeps it forever.
  std::optional<int> visible_until;
};

struct SceneSpec {
  int width = 640;
  int height = 480;
  int frames = 30;
  std::uint64_t seed = 1;
  Texture background = Texture::kNoise;
  Vec2 camera_drift;  // px per frame, applied to background and objects
  std::vector<SceneObject> objects;
};

inline constexpr int kMinObjectSize = 8;
inline constexpr double kMaxObjectSpeed = 8.0;

// Throws SceneError naming the offending field.
void ValidateScene(const SceneSpec& spec);

// Key-value text: width, height, frames, seed, background, drift (dx dy) and
// one `object = class w h x y vx vy [texture] [shape] [until]` line per object.
SceneSpec ParseSceneSpec(std::string_view text);
std::string FormatSceneSpec(const SceneSpec& spec);

// Renders frames on demand. Object ids are the 1-based object index. A GT
// entry is emitted while the object's box centre lies inside the frame; the
// box is the tight extent of the visible mask.
class SceneRenderer {
 public:
  explicit SceneRenderer(SceneSpec spec);

  const SceneSpec& spec() const { return spec_; }
  ImageBuffer RenderFrame(int t) const;
  std::vector<GtInstance> FrameTruth(int t) const;
  GroundTruthStore Truth() const;

 private:
  // Integer top-left corner of object i at frame t.
  std::pair<int, int> Placement(int i, int t) const;
  bool Present(int i, int t) const;
  bool InShape(const SceneObject& o, int lx, int ly) const;

  SceneSpec spec_;
  std::vector<std::uint8_t> background_;  // cached when the camera is static
};

// Seeded random scene whose objects stay fully inside the frame and keep a
// margin from each other on every frame. Throws SceneError when no placement
// is found.
struct RandomSceneOptions {
  int width = 640;
  int height = 480;
  int frames = 30;
  int objects = 3;
  int min_size = 40;
  int max_size = 80;
  double max_speed = 3.0;
  int margin = 16;
  bool allow_stripes = false;
  std::uint64_t seed = 1;
};

SceneSpec MakeRandomScene(const RandomSceneOptions& options);

struct Sequence {
  std::vector<ImageBuffer> frames;
  GroundTruthStore truth;
};

Sequence RenderSequence(const SceneSpec& spec);

// Writes %06d.ppm frames (1-based), gt.txt, masks/%06d.txt and manifest.txt.
// Returns the manifest text. Throws IoError naming the failing path.
std::string WriteSequence(const SceneSpec& spec,
                          const std::filesystem::path& dir);

}  // namespace flowtrack

#endif  // FLOWTRACK_SYNTH_H_
