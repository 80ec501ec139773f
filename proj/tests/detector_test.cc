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

#include <chrono>
#include <filesystem>

#include <gtest/gtest.h>

#include "flowtrack/detector.h"
#include "flowtrack/image_io.h"

namespace flowtrack {
namespace {

using namespace std::chrono_literals;

std::shared_ptr<GroundTruthStore> OneObjectStore(int frames) {
  auto store = std::make_shared<GroundTruthStore>(frames);
  for (int f = 0; f < frames; ++f) {
    GtInstance g;
    g.id = 1;
    g.class_id = 3;
    g.box = {100.0 + f, 60, 40, 30};
    g.mask = InstanceMask::Filled(100 + f, 60, 40, 30);
    store->mutable_frame(f).push_back(g);
  }
  return store;
}

TEST(OracleTest, NoiseFreePassThroughInWindowCoordinates) {
  OracleDetector det(OneObjectStore(3), OracleNoiseModel{});
  const ImageBuffer frame(320, 240, 3);
  const auto out = det.Detect({frame, {64, 32, 128, 128}, 2, 0});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].class_id, 3);
  EXPECT_EQ(out[0].box, (BoundingBox{38, 28, 40, 30}));
  ASSERT_TRUE(out[0].mask.has_value());
  EXPECT_EQ(out[0].mask->origin_x(), 38);
  EXPECT_DOUBLE_EQ(out[0].confidence, 0.9);
  // Centre outside the region, and frames past the store.
  EXPECT_TRUE(det.Detect({frame, {0, 0, 64, 64}, 0, 1}).empty());
  EXPECT_TRUE(det.Detect({frame, {64, 32, 128, 128}, 7, 0}).empty());
}

TEST(OracleTest, DeterministicPerFrameAndWindow) {
  const auto noise = ParseNoiseSpec("miss=0.3,fp=1,jitter=2,conf=0.4-0.9,seed=5");
  OracleDetector a(OneObjectStore(10), noise), b(OneObjectStore(10), noise);
  const ImageBuffer frame(320, 240, 3);
  for (int f = 9; f >= 0; --f) {
    const auto x = a.Detect({frame, {0, 0, 320, 240}, f, 2});
    const auto y = b.Detect({frame, {0, 0, 320, 240}, f, 2});
    ASSERT_EQ(x.size(), y.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_EQ(x[i].box, y[i].box);
      EXPECT_EQ(x[i].confidence, y[i].confidence);
    }
  }
}

TEST(OracleTest, MissAndFalsePositiveRates) {
  auto store = std::make_shared<GroundTruthStore>(4000);
  for (int f = 0; f < 4000; ++f) {
    GtInstance g;
    g.id = 1;
    g.class_id = 1;
    g.box = {10, 10, 40, 40};
    g.mask = InstanceMask::Filled(10, 10, 40, 40);
    store->mutable_frame(f).push_back(g);
  }
  OracleDetector det(store, ParseNoiseSpec("miss=0.25,fp=0.5,seed=3"));
  const ImageBuffer frame(200, 200, 3);
  int kept = 0, spurious = 0;
  for (int f = 0; f < 4000; ++f) {
    for (const auto& d : det.Detect({frame, {0, 0, 200, 200}, f, 0})) {
      (d.class_id == 1 ? kept : spurious)++;
      ValidateDetection(d);
    }
  }
  EXPECT_NEAR(kept / 4000.0, 0.75, 0.03);
  EXPECT_NEAR(spurious / 4000.0, 0.5, 0.05);
}

TEST(NoiseSpecTest, ParsesAndRejects) {
  const auto n = ParseNoiseSpec("conf=0.5-0.95,jitter=1.5");
  EXPECT_DOUBLE_EQ(n.confidence_lo, 0.5);
  EXPECT_DOUBLE_EQ(n.confidence_hi, 0.95);
  EXPECT_DOUBLE_EQ(n.box_jitter_sigma, 1.5);
  EXPECT_DOUBLE_EQ(n.miss_rate, 0.0);
  const auto back = ParseNoiseSpec(FormatNoiseSpec(n));
  EXPECT_DOUBLE_EQ(back.confidence_lo, 0.5);
  EXPECT_THROW(ParseNoiseSpec("speed=3"), std::invalid_argument);
  EXPECT_THROW(ParseNoiseSpec("miss=1.5"), std::invalid_argument);
  EXPECT_THROW(ParseNoiseSpec("conf=0.9-0.5"), std::invalid_argument);
}

TEST(RecordTest, RoundTripAndErrors) {
  const Detection d = ParseDetectionRecord("2 1.5 3 20 10 0.75 20x10:0,200");
  EXPECT_EQ(d.class_id, 2);
  EXPECT_EQ(d.box, (BoundingBox{1.5, 3, 20, 10}));
  ASSERT_TRUE(d.mask.has_value());
  EXPECT_EQ(d.mask->ForegroundCount(), 200);
  const Detection e = ParseDetectionRecord(FormatDetectionRecord(d));
  EXPECT_EQ(e.box, d.box);
  EXPECT_EQ(*e.mask, *d.mask);
  EXPECT_FALSE(ParseDetectionRecord("1 0 0 5 5 0.5 -").mask.has_value());
  EXPECT_THROW(ParseDetectionRecord("1 0 0 5"), ProtocolError);
  EXPECT_THROW(ParseDetectionRecord("1 0 0 5 5 1.5 -"), ProtocolError);
  EXPECT_THROW(ParseDetectorResponse("OK 2", {"1 0 0 5 5 0.5 -"}), ProtocolError);
  EXPECT_THROW(ParseDetectorResponse("ERR", {}), ProtocolError);
}

TEST(RegionTest, CropsAndReplicatesLuma) {
  ImageBuffer gray(4, 4, 1);
  gray.at(2, 1) = 9;
  const auto rgb = RegionRgb(gray, {2, 1, 2, 2});
  ASSERT_EQ(rgb.size(), 12u);
  EXPECT_EQ(rgb[0], 9);
  EXPECT_EQ(rgb[2], 9);
}

std::string Fake(const std::string& mode) {
  return std::string(FAKE_DETECTOR_PATH) + " " + mode;
}

TEST(ExternalTest, BoxWithMask) {
  ExternalDetector det(Fake("box"), 5000ms);
  const ImageBuffer frame(64, 64, 3);
  for (int f = 0; f < 3; ++f) {
    const auto out = det.Detect({frame, {0, 0, 32, 32}, f, 0});
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].box, (BoundingBox{4, 6, 20, 10}));
    EXPECT_TRUE(out[0].mask.has_value());
  }
}

TEST(ExternalTest, NoMaskAndEmpty) {
  const ImageBuffer frame(16, 16, 3);
  ExternalDetector nomask(Fake("nomask"), 5000ms);
  const auto out = nomask.Detect({frame, {0, 0, 16, 16}, 0, 0});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(out[0].mask.has_value());
  ExternalDetector empty(Fake("empty"), 5000ms);
  EXPECT_TRUE(empty.Detect({frame, {0, 0, 16, 16}, 0, 0}).empty());
}

TEST(ExternalTest, FailureModes) {
  const ImageBuffer frame(16, 16, 3);
  const DetectRequest req{frame, {0, 0, 16, 16}, 0, 0};
  ExternalDetector garbage(Fake("garbage"), 5000ms);
  try {
    garbage.Detect(req);
    FAIL();
  } catch (const ProtocolError& e) {
    EXPECT_NE(e.line().find("three"), std::string::npos);
  }
  ExternalDetector hang(Fake("hang"), 200ms);
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_THROW(hang.Detect(req), DetectorUnavailable);
  EXPECT_LT(std::chrono::steady_clock::now() - t0, 5s);
  ExternalDetector gone(Fake("exit"), 5000ms);
  EXPECT_THROW(gone.Detect(req), DetectorClosed);
}

TEST(StubTest, DelaysAndDelegates) {
  auto inner = std::make_shared<OracleDetector>(OneObjectStore(1), OracleNoiseModel{});
  StubDetector stub(20ms, inner);
  const ImageBuffer frame(320, 240, 3);
  const auto t0 = std::chrono::steady_clock::now();
  EXPECT_EQ(stub.Detect({frame, {0, 0, 320, 240}, 0, 0}).size(), 1u);
  EXPECT_GE(std::chrono::steady_clock::now() - t0, 20ms);
  StubDetector bare(0us);
  EXPECT_TRUE(bare.Detect({frame, {0, 0, 320, 240}, 0, 0}).empty());
}

TEST(FactoryTest, BuildsFromSpec) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "flowtrack_factory_test";
  fs::create_directories(dir);
  WriteTextFile(dir / "gt.txt", "1,1,10,10,20,20,1,1,1\n");
  const std::string gt = (dir / "gt.txt").string();
  EXPECT_NE(dynamic_cast<OracleDetector*>(MakeDetector("oracle:" + gt, 1000ms).get()),
            nullptr);
  auto noisy = MakeDetector("oracle:" + gt + ":miss=0.5", 1000ms);
  EXPECT_DOUBLE_EQ(dynamic_cast<OracleDetector&>(*noisy).noise().miss_rate, 0.5);
  EXPECT_NE(dynamic_cast<StubDetector*>(MakeDetector("stub:1:oracle:" + gt, 1000ms).get()),
            nullptr);
  EXPECT_NE(MakeDetector("exec:" + Fake("empty"), 1000ms), nullptr);
  EXPECT_THROW(MakeDetector("yolo:x", 1000ms), std::invalid_argument);
  EXPECT_THROW(MakeDetector("stub:abc", 1000ms), std::invalid_argument);
  EXPECT_THROW(MakeDetector("oracle:" + (dir / "none.txt").string(), 1000ms), IoError);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace flowtrack
