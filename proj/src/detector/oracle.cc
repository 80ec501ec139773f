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

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "flowtrack/detector.h"
#include "flowtrack/rng.h"

namespace flowtrack {
namespace {

constexpr int kFalsePositiveMin = 20;
constexpr int kFalsePositiveMax = 120;
constexpr double kMaskTolerance = 2.0;

double ParseValue(std::string_view key, std::string_view v) {
  std::string s(v);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(out)) {
    throw std::invalid_argument(
        fmt::format("noise spec: bad value '{}' for '{}'", v, key));
  }
  return out;
}

}  // namespace

OracleNoiseModel ParseNoiseSpec(std::string_view spec) {
  OracleNoiseModel noise;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    const std::string_view item = spec.substr(0, comma);
    spec = comma == std::string_view::npos ? std::string_view{}
                                           : spec.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument(
          fmt::format("noise spec: expected key=value, got '{}'", item));
    }
    const auto key = item.substr(0, eq);
    const auto value = item.substr(eq + 1);
    if (key == "miss") {
      noise.miss_rate = ParseValue(key, value);
    } else if (key == "fp") {
      noise.false_positive_rate = ParseValue(key, value);
    } else if (key == "jitter") {
      noise.box_jitter_sigma = ParseValue(key, value);
    } else if (key == "seed") {
      noise.seed = static_cast<std::uint64_t>(ParseValue(key, value));
    } else if (key == "conf") {
      const auto dash = value.find('-', 1);
      if (dash == std::string_view::npos) {
        noise.confidence_lo = noise.confidence_hi = ParseValue(key, value);
      } else {
        noise.confidence_lo = ParseValue(key, value.substr(0, dash));
        noise.confidence_hi = ParseValue(key, value.substr(dash + 1));
      }
    } else {
      throw std::invalid_argument(fmt::format("noise spec: unknown key '{}'", key));
    }
  }
  if (noise.miss_rate < 0.0 || noise.miss_rate > 1.0 ||
      noise.false_positive_rate < 0.0 || noise.box_jitter_sigma < 0.0 ||
      noise.confidence_lo < 0.0 || noise.confidence_hi > 1.0 ||
      noise.confidence_lo > noise.confidence_hi) {
    throw std::invalid_argument("noise spec: value out of range");
  }
  return noise;
}

std::string FormatNoiseSpec(const OracleNoiseModel& n) {
  return fmt::format("miss={},fp={},jitter={},conf={}-{},seed={}", n.miss_rate,
                     n.false_positive_rate, n.box_jitter_sigma, n.confidence_lo,
                     n.confidence_hi, n.seed);
}

OracleDetector::OracleDetector(std::shared_ptr<const GroundTruthStore> store,
                               OracleNoiseModel noise)
    : store_(std::move(store)), noise_(noise) {}

std::vector<Detection> OracleDetector::Detect(const DetectRequest& req) {
  static const std::vector<GtInstance> kNone;
  const bool known = req.frame_index >= 0 && req.frame_index < store_->frame_count();
  const auto& instances = known ? store_->at(req.frame_index) : kNone;
  KeyedRng rng(noise_.seed, static_cast<std::uint64_t>(req.frame_index),
               static_cast<std::uint64_t>(req.window_index));
  const int ox = static_cast<int>(req.region.x);
  const int oy = static_cast<int>(req.region.y);
  const Vec2 to_local{-static_cast<double>(ox), -static_cast<double>(oy)};

  std::vector<Detection> out;
  for (const auto& g : instances) {
    if (!BoxContains(req.region, BoxCenter(g.box))) continue;
    // Every instance consumes the same draws whether or not it survives.
    const bool missed = rng.Uniform() < noise_.miss_rate;
    double jitter[4] = {0.0, 0.0, 0.0, 0.0};
    for (double& j : jitter) j = rng.Gaussian(noise_.box_jitter_sigma);
    const double conf = rng.Uniform(noise_.confidence_lo, noise_.confidence_hi);
    if (missed) continue;

    const double left = g.box.x + jitter[0];
    const double top = g.box.y + jitter[1];
    const double right = std::max(g.box.right() + jitter[2], left + 1.0);
    const double bottom = std::max(g.box.bottom() + jitter[3], top + 1.0);
    Detection det;
    det.class_id = g.class_id;
    det.confidence = std::clamp(conf, 0.0, 1.0);
    det.box = TranslateBox({left, top, right - left, bottom - top}, to_local);
    if (g.mask) {
      std::optional<InstanceMask> mask = g.mask;
      if (noise_.box_jitter_sigma > 0.0) {
        const int cx = static_cast<int>(std::ceil(left - kMaskTolerance));
        const int cy = static_cast<int>(std::ceil(top - kMaskTolerance));
        const int cr = static_cast<int>(std::floor(right + kMaskTolerance));
        const int cb = static_cast<int>(std::floor(bottom + kMaskTolerance));
        mask = g.mask->Cropped(cx, cy, cr - cx, cb - cy);
      }
      if (mask) det.mask = mask->Translated(-ox, -oy);
    }
    out.push_back(std::move(det));
  }

  const int spurious = rng.Poisson(noise_.false_positive_rate);
  const int rw = static_cast<int>(req.region.w);
  const int rh = static_cast<int>(req.region.h);
  for (int i = 0; i < spurious; ++i) {
    const int w = std::min(rng.UniformInt(kFalsePositiveMin, kFalsePositiveMax), rw);
    const int h = std::min(rng.UniformInt(kFalsePositiveMin, kFalsePositiveMax), rh);
    const int x = rng.UniformInt(0, rw - w);
    const int y = rng.UniformInt(0, rh - h);
    Detection det;
    det.class_id = 0;
    det.confidence = std::clamp(
        rng.Uniform(noise_.confidence_lo, noise_.confidence_hi), 0.0, 1.0);
    det.box = {static_cast<double>(x), static_cast<double>(y),
               static_cast<double>(w), static_cast<double>(h)};
    det.mask = InstanceMask::Filled(x, y, w, h);
    out.push_back(std::move(det));
  }
  return out;
}

}  // namespace flowtrack
