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

#include "flowtrack/synth.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "flowtrack/image_io.h"
#include "flowtrack/rng.h"

namespace flowtrack {
namespace {

namespace fs = std::filesystem;

int FloorDiv(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

double LatticeValue(std::uint64_t seed, int ix, int iy) {
  const std::uint64_t h =
      SplitMix64(seed ^ SplitMix64((static_cast<std::uint64_t>(
                                        static_cast<std::uint32_t>(ix))
                                    << 32) |
                                   static_cast<std::uint32_t>(iy)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Smooth value noise in [0, 1] with the given lattice spacing.
double ValueNoise(std::uint64_t seed, int x, int y, int cell) {
  const int ix = FloorDiv(x, cell);
  const int iy = FloorDiv(y, cell);
  double fx = static_cast<double>(x - ix * cell) / cell;
  double fy = static_cast<double>(y - iy * cell) / cell;
  fx = fx * fx * (3.0 - 2.0 * fx);
  fy = fy * fy * (3.0 - 2.0 * fy);
  const double a = LatticeValue(seed, ix, iy);
  const double b = LatticeValue(seed, ix + 1, iy);
  const double c = LatticeValue(seed, ix, iy + 1);
  const double d = LatticeValue(seed, ix + 1, iy + 1);
  return (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
}

std::uint8_t TextureValue(Texture tex, std::uint64_t seed, int x, int y) {
  double v = 0.0;
  switch (tex) {
    case Texture::kNoise:
      v = 0.6 * ValueNoise(seed, x, y, 12) + 0.4 * ValueNoise(seed + 1, x, y, 4);
      v = 20.0 + 215.0 * v;
      break;
    case Texture::kChecker:
      v = ((FloorDiv(x, 8) + FloorDiv(y, 8)) & 1) ? 200.0 : 50.0;
      v += 40.0 * (ValueNoise(seed, x, y, 3) - 0.5);
      break;
    case Texture::kStripes:
      v = (FloorDiv(x + 2 * y, 6) & 1) ? 190.0 : 60.0;
      v += 60.0 * (ValueNoise(seed, x, y, 4) - 0.5);
      break;
  }
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

std::uint64_t ObjectSeed(std::uint64_t scene_seed, int index) {
  return SplitMix64(scene_seed * 0x100000001b3ULL + static_cast<std::uint64_t>(index) + 1);
}

Texture ParseTexture(std::string_view s) {
  if (s == "noise") return Texture::kNoise;
  if (s == "checker") return Texture::kChecker;
  if (s == "stripes") return Texture::kStripes;
  throw SceneError(fmt::format("unknown texture '{}'", s));
}

std::optional<Shape> TryParseShape(std::string_view s) {
  if (s == "rect" || s == "rectangle") return Shape::kRectangle;
  if (s == "ellipse") return Shape::kEllipse;
  return std::nullopt;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T ParseScalar(const std::string& tok, int line_no, std::string_view what) {
  std::istringstream in(tok);
  T v{};
  std::string rest;
  if (!(in >> v) || (in >> rest)) {
    throw SceneError(fmt::format("line {}: bad {} '{}'", line_no, what, tok));
  }
  return v;
}

}  // namespace

const char* ToString(Texture t) {
  switch (t) {
    case Texture::kNoise: return "noise";
    case Texture::kChecker: return "checker";
    case Texture::kStripes: return "stripes";
  }
  return "noise";
}

const char* ToString(Shape s) {
  return s == Shape::kEllipse ? "ellipse" : "rect";
}

void ValidateScene(const SceneSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) {
    throw SceneError(fmt::format("frame size must be positive, got {}x{}",
                                 spec.width, spec.height));
  }
  if (spec.frames < 1) throw SceneError("frames must be at least 1");
  for (std::size_t i = 0; i < spec.objects.size(); ++i) {
    const auto& o = spec.objects[i];
    if (o.width < kMinObjectSize || o.height < kMinObjectSize) {
      throw SceneError(fmt::format("object {}: size {}x{} below {} px", i + 1,
                                   o.width, o.height, kMinObjectSize));
    }
    if (Norm(o.velocity + spec.camera_drift) > kMaxObjectSpeed) {
      throw SceneError(fmt::format("object {}: motion exceeds {} px per frame",
                                   i + 1, kMaxObjectSpeed));
    }
    if (o.class_id < 0) throw SceneError(fmt::format("object {}: negative class", i + 1));
    if (o.visible_until && *o.visible_until < 0) {
      throw SceneError(fmt::format("object {}: negative visibility limit", i + 1));
    }
  }
}

SceneSpec ParseSceneSpec(std::string_view text) {
  SceneSpec spec;
  int line_no = 0;
  std::istringstream lines{std::string(text)};
  for (std::string raw; std::getline(lines, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw SceneError(fmt::format("line {}: expected key = value", line_no));
    }
    const std::string key(Trim(line.substr(0, eq)));
    std::istringstream value{std::string(Trim(line.substr(eq + 1)))};
    std::vector<std::string> tok;
    for (std::string t; value >> t;) tok.push_back(t);
    auto need = [&](std::size_t lo, std::size_t hi) {
      if (tok.size() < lo || tok.size() > hi) {
        throw SceneError(fmt::format("line {}: wrong number of values for '{}'",
                                     line_no, key));
      }
    };
    if (key == "width") {
      need(1, 1);
      spec.width = ParseScalar<int>(tok[0], line_no, key);
    } else if (key == "height") {
      need(1, 1);
      spec.height = ParseScalar<int>(tok[0], line_no, key);
    } else if (key == "frames") {
      need(1, 1);
      spec.frames = ParseScalar<int>(tok[0], line_no, key);
    } else if (key == "seed") {
      need(1, 1);
      spec.seed = ParseScalar<std::uint64_t>(tok[0], line_no, key);
    } else if (key == "background") {
      need(1, 1);
      spec.background = ParseTexture(tok[0]);
    } else if (key == "drift") {
      need(2, 2);
      spec.camera_drift = {ParseScalar<double>(tok[0], line_no, key),
                           ParseScalar<double>(tok[1], line_no, key)};
    } else if (key == "object") {
      need(7, 10);
      SceneObject o;
      o.class_id = ParseScalar<int>(tok[0], line_no, "class");
      o.width = ParseScalar<int>(tok[1], line_no, "width");
      o.height = ParseScalar<int>(tok[2], line_no, "height");
      o.start = {ParseScalar<double>(tok[3], line_no, "x"),
                 ParseScalar<double>(tok[4], line_no, "y")};
      o.velocity = {ParseScalar<double>(tok[5], line_no, "vx"),
                    ParseScalar<double>(tok[6], line_no, "vy")};
      for (std::size_t k = 7; k < tok.size(); ++k) {
        if (auto shape = TryParseShape(tok[k])) {
          o.shape = *shape;
        } else if (std::isdigit(static_cast<unsigned char>(tok[k][0]))) {
          o.visible_until = ParseScalar<int>(tok[k], line_no, "visibility limit");
        } else {
          o.texture = ParseTexture(tok[k]);
        }
      }
      spec.objects.push_back(o);
    } else {
      throw SceneError(fmt::format("line {}: unknown key '{}'", line_no, key));
    }
  }
  ValidateScene(spec);
  return spec;
}

std::string FormatSceneSpec(const SceneSpec& spec) {
  std::string out = fmt::format(
      "width = {}\nheight = {}\nframes = {}\nseed = {}\nbackground = {}\n"
      "drift = {} {}\n",
      spec.width, spec.height, spec.frames, spec.seed, ToString(spec.background),
      spec.camera_drift.x, spec.camera_drift.y);
  for (const auto& o : spec.objects) {
    out += fmt::format("object = {} {} {} {} {} {} {} {} {}", o.class_id, o.width,
                       o.height, o.start.x, o.start.y, o.velocity.x,
                       o.velocity.y, ToString(o.texture), ToString(o.shape));
    if (o.visible_until) out += fmt::format(" {}", *o.visible_until);
    out += "\n";
  }
  return out;
}

SceneRenderer::SceneRenderer(SceneSpec spec) : spec_(std::move(spec)) {
  ValidateScene(spec_);
  if (spec_.camera_drift == Vec2{}) {
    background_.resize(static_cast<std::size_t>(spec_.width) * spec_.height);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < spec_.height; ++y) {
      for (int x = 0; x < spec_.width; ++x) {
        background_[static_cast<std::size_t>(y) * spec_.width + x] =
            TextureValue(spec_.background, spec_.seed, x, y);
      }
    }
  }
}

std::pair<int, int> SceneRenderer::Placement(int i, int t) const {
  const auto& o = spec_.objects[i];
  const Vec2 p = o.start + static_cast<double>(t) * (o.velocity + spec_.camera_drift);
  return {static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y))};
}

bool SceneRenderer::Present(int i, int t) const {
  const auto& o = spec_.objects[i];
  return !o.visible_until || t < *o.visible_until;
}

bool SceneRenderer::InShape(const SceneObject& o, int lx, int ly) const {
  if (lx < 0 || ly < 0 || lx >= o.width || ly >= o.height) return false;
  if (o.shape == Shape::kRectangle) return true;
  const double nx = (lx + 0.5) / o.width * 2.0 - 1.0;
  const double ny = (ly + 0.5) / o.height * 2.0 - 1.0;
  return nx * nx + ny * ny <= 1.0;
}

ImageBuffer SceneRenderer::RenderFrame(int t) const {
  const int w = spec_.width, h = spec_.height;
  ImageBuffer img(w, h, 3);
  const int sx = static_cast<int>(std::lround(spec_.camera_drift.x * t));
  const int sy = static_cast<int>(std::lround(spec_.camera_drift.y * t));
#pragma omp parallel for schedule(static)
  for (int y = 0; y < h; ++y) {
    std::uint8_t* row = img.row(y);
    for (int x = 0; x < w; ++x) {
      const std::uint8_t v =
          background_.empty()
              ? TextureValue(spec_.background, spec_.seed, x - sx, y - sy)
              : background_[static_cast<std::size_t>(y) * w + x];
      row[3 * x] = row[3 * x + 1] = row[3 * x + 2] = v;
    }
  }
  for (int i = 0; i < static_cast<int>(spec_.objects.size()); ++i) {
    if (!Present(i, t)) continue;
    const auto& o = spec_.objects[i];
    const auto [ox, oy] = Placement(i, t);
    const std::uint64_t seed = ObjectSeed(spec_.seed, i);
    const int x0 = std::max(ox, 0), x1 = std::min(ox + o.width, w);
    const int y0 = std::max(oy, 0), y1 = std::min(oy + o.height, h);
    for (int y = y0; y < y1; ++y) {
      std::uint8_t* row = img.row(y);
      for (int x = x0; x < x1; ++x) {
        if (!InShape(o, x - ox, y - oy)) continue;
        const int v = TextureValue(o.texture, seed, x - ox, y - oy);
        row[3 * x] = static_cast<std::uint8_t>(v);
        row[3 * x + 1] = static_cast<std::uint8_t>(std::min(255, v * 7 / 8 + 24));
        row[3 * x + 2] = static_cast<std::uint8_t>(v * 3 / 4);
      }
    }
  }
  return img;
}

std::vector<GtInstance> SceneRenderer::FrameTruth(int t) const {
  std::vector<GtInstance> out;
  const int w = spec_.width, h = spec_.height;
  for (int i = 0; i < static_cast<int>(spec_.objects.size()); ++i) {
    if (!Present(i, t)) continue;
    const auto& o = spec_.objects[i];
    const auto [ox, oy] = Placement(i, t);
    const double cx = ox + o.width / 2.0;
    const double cy = oy + o.height / 2.0;
    if (cx < 0 || cy < 0 || cx >= w || cy >= h) continue;
    const int x0 = std::max(ox, 0), x1 = std::min(ox + o.width, w);
    const int y0 = std::max(oy, 0), y1 = std::min(oy + o.height, h);
    std::vector<std::uint8_t> bits(static_cast<std::size_t>(x1 - x0) * (y1 - y0), 0);
    bool any = false;
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        if (InShape(o, x - ox, y - oy)) {
          bits[static_cast<std::size_t>(y - y0) * (x1 - x0) + (x - x0)] = 1;
          any = true;
        }
      }
    }
    if (!any) continue;
    InstanceMask mask =
        InstanceMask(x0, y0, x1 - x0, y1 - y0, std::move(bits)).Trimmed();
    GtInstance g;
    g.id = i + 1;
    g.class_id = o.class_id;
    g.box = mask.Extent();
    g.mask = std::move(mask);
    out.push_back(std::move(g));
  }
  return out;
}

GroundTruthStore SceneRenderer::Truth() const {
  GroundTruthStore store(spec_.frames);
  for (int t = 0; t < spec_.frames; ++t) store.mutable_frame(t) = FrameTruth(t);
  return store;
}

SceneSpec MakeRandomScene(const RandomSceneOptions& opt) {
  SceneSpec spec;
  spec.width = opt.width;
  spec.height = opt.height;
  spec.frames = opt.frames;
  spec.seed = opt.seed;
  if (opt.min_size < kMinObjectSize || opt.max_size < opt.min_size ||
      opt.max_speed < 0.0 || opt.max_speed > kMaxObjectSpeed || opt.objects < 0) {
    throw SceneError("random scene: inconsistent size or speed bounds");
  }
  KeyedRng rng(opt.seed, 0x5ce4e);
  const int last = opt.frames - 1;
  auto box_at = [](const SceneObject& o, int t) {
    const Vec2 p = o.start + static_cast<double>(t) * o.velocity;
    return BoundingBox{std::round(p.x), std::round(p.y),
                       static_cast<double>(o.width), static_cast<double>(o.height)};
  };
  constexpr int kAttempts = 2000;
  for (int i = 0; i < opt.objects; ++i) {
    bool placed = false;
    for (int attempt = 0; attempt < kAttempts && !placed; ++attempt) {
      SceneObject o;
      o.width = rng.UniformInt(opt.min_size, opt.max_size);
      o.height = rng.UniformInt(opt.min_size, opt.max_size);
      const double speed = rng.Uniform(0.0, opt.max_speed);
      const double angle = rng.Uniform(0.0, 2.0 * std::numbers::pi);
      o.velocity = {speed * std::cos(angle), speed * std::sin(angle)};
      // Start range that keeps the whole path inside the frame.
      const double travel_x = o.velocity.x * last;
      const double travel_y = o.velocity.y * last;
      const double lo_x = std::max(0.0, -travel_x) + 1.0;
      const double hi_x = opt.width - o.width - std::max(0.0, travel_x) - 1.0;
      const double lo_y = std::max(0.0, -travel_y) + 1.0;
      const double hi_y = opt.height - o.height - std::max(0.0, travel_y) - 1.0;
      if (hi_x < lo_x || hi_y < lo_y) continue;
      o.start = {std::round(rng.Uniform(lo_x, hi_x)), std::round(rng.Uniform(lo_y, hi_y))};
      const int kinds = opt.allow_stripes ? 3 : 2;
      o.texture = static_cast<Texture>(i % kinds);
      bool clear = true;
      for (int t = 0; t <= last && clear; ++t) {
        BoundingBox a = box_at(o, t);
        a = {a.x - opt.margin, a.y - opt.margin, a.w + 2.0 * opt.margin,
             a.h + 2.0 * opt.margin};
        for (const auto& other : spec.objects) {
          if (Intersects(a, box_at(other, t))) {
            clear = false;
            break;
          }
        }
      }
      if (clear) {
        spec.objects.push_back(o);
        placed = true;
      }
    }
    if (!placed) {
      throw SceneError(fmt::format("random scene: no room for object {}", i + 1));
    }
  }
  ValidateScene(spec);
  return spec;
}

Sequence RenderSequence(const SceneSpec& spec) {
  SceneRenderer renderer(spec);
  Sequence seq;
  seq.frames.resize(spec.frames);
  for (int t = 0; t < spec.frames; ++t) seq.frames[t] = renderer.RenderFrame(t);
  seq.truth = renderer.Truth();
  return seq;
}

std::string WriteSequence(const SceneSpec& spec, const fs::path& dir) {
  SceneRenderer renderer(spec);
  std::error_code ec;
  fs::create_directories(dir / "masks", ec);
  if (ec) {
    throw IoError(fmt::format("cannot create directory {}: {}",
                              (dir / "masks").string(), ec.message()));
  }
  const GroundTruthStore truth = renderer.Truth();
  for (int t = 0; t < spec.frames; ++t) {
    WritePnm(dir / fmt::format("{:06d}.ppm", t + 1), renderer.RenderFrame(t));
    WriteTextFile(dir / "masks" / fmt::format("{:06d}.txt", t + 1),
                  FormatMaskFile(truth.at(t)));
  }
  WriteTextFile(dir / "gt.txt", FormatGroundTruthCsv(truth));
  std::string manifest = fmt::format(
      "width = {}\nheight = {}\nframes = {}\nseed = {}\nobjects = {}\n"
      "frame_format = ppm\n",
      spec.width, spec.height, spec.frames, spec.seed, spec.objects.size());
  manifest += "# scene\n";
  std::istringstream scene(FormatSceneSpec(spec));
  for (std::string line; std::getline(scene, line);) manifest += "# " + line + "\n";
  WriteTextFile(dir / "manifest.txt", manifest);
  return manifest;
}

}  // namespace flowtrack
