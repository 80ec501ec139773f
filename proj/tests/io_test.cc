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

#include <filesystem>

#include <gtest/gtest.h>

#include "flowtrack/image_io.h"
#include "flowtrack/mot_io.h"
#include "flowtrack/rle.h"

namespace flowtrack {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("flowtrack_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

using PnmTest = TempDir;

TEST_F(PnmTest, RoundTripsRgbAndGray) {
  ImageBuffer rgb(5, 3, 3);
  for (std::size_t i = 0; i < rgb.data().size(); ++i) rgb.data()[i] = static_cast<std::uint8_t>(i * 7);
  WritePnm(dir_ / "a.ppm", rgb);
  EXPECT_EQ(ReadPnm(dir_ / "a.ppm"), rgb);
  ImageBuffer gray(4, 4, 1, 200);
  WritePnm(dir_ / "b.pgm", gray);
  EXPECT_EQ(ReadPnm(dir_ / "b.pgm"), gray);
}

TEST_F(PnmTest, ErrorsNameThePath) {
  try {
    ReadPnm(dir_ / "missing.ppm");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("missing.ppm"), std::string::npos);
  }
  WriteTextFile(dir_ / "bad.ppm", "P3\n1 1\n255\n0 0 0\n");
  EXPECT_THROW(ReadPnm(dir_ / "bad.ppm"), IoError);
  WriteTextFile(dir_ / "short.ppm", "P6\n2 2\n255\nabc");
  EXPECT_THROW(ReadPnm(dir_ / "short.ppm"), IoError);
}

TEST_F(PnmTest, ListFramesSortsAndFilters) {
  WritePnm(dir_ / "000002.ppm", ImageBuffer(1, 1, 3));
  WritePnm(dir_ / "000001.ppm", ImageBuffer(1, 1, 3));
  WriteTextFile(dir_ / "notes.txt", "x");
  const auto frames = ListFrames(dir_);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_EQ(frames[0].filename(), "000001.ppm");
  EXPECT_THROW(ListFrames(dir_ / "nope"), IoError);
}

TEST(MotCsvTest, ParsesRowsAndSkipsComments) {
  const auto rows = ParseMotCsv(
      "# header\n"
      "1,3,10.5,20,30,40,0.9,2,1\n"
      "\n"
      "2,3,11,21,30,40,1,-1,-1,-1\n");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].frame, 0);
  EXPECT_EQ(rows[0].id, 3);
  EXPECT_DOUBLE_EQ(rows[0].box.x, 10.5);
  EXPECT_EQ(rows[0].class_id, 2);
  EXPECT_EQ(rows[1].frame, 1);
}

TEST(MotCsvTest, ReportsLineNumbers) {
  try {
    ParseMotCsv("1,1,0,0,5,5\n1,2,0,zero,5,5\n");
    FAIL();
  } catch (const MotFormatError& e) {
    EXPECT_EQ(e.line(), 2);
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  EXPECT_THROW(ParseMotCsv("0,1,0,0,5,5\n"), MotFormatError);
  EXPECT_THROW(ParseMotCsv("1,1,0,0,5\n"), MotFormatError);
  EXPECT_THROW(ParseMotCsv("1,1,0,0,0,5\n"), MotFormatError);
}

TEST(MotCsvTest, ResultFormat) {
  MotRow r;
  r.frame = 4;
  r.id = 9;
  r.box = {1.005, 2, 30.25, 40};
  r.conf = 1.2;
  EXPECT_EQ(FormatResultCsv({r}), "5,9,1.00,2.00,30.25,40.00,1.2000,-1,-1,-1\n");
  EXPECT_EQ(FormatNumber(3.0), "3");
  EXPECT_EQ(FormatNumber(0.25), "0.25");
}

using GroundTruthTest = TempDir;

TEST_F(GroundTruthTest, LoadsMasksAndManifestFrameCount) {
  WriteTextFile(dir_ / "gt.txt", "1,1,10,20,3,2,1,0,1\n2,1,11,20,3,2,1,0,1\n");
  fs::create_directories(dir_ / "masks");
  WriteTextFile(dir_ / "masks" / "000001.txt", "1 3x2:0,6\n");
  WriteTextFile(dir_ / "manifest.txt", "width = 64\nframes = 5\n");
  const GroundTruthStore gt = LoadGroundTruth(dir_ / "gt.txt");
  EXPECT_EQ(gt.frame_count(), 5);
  ASSERT_EQ(gt.at(0).size(), 1u);
  ASSERT_TRUE(gt.at(0)[0].mask.has_value());
  EXPECT_EQ(gt.at(0)[0].mask->origin_x(), 10);
  EXPECT_FALSE(gt.at(1)[0].mask.has_value());
  EXPECT_TRUE(gt.at(4).empty());
  EXPECT_THROW(gt.at(5), std::out_of_range);
}

TEST_F(GroundTruthTest, FormatRoundTrip) {
  GroundTruthStore store(2);
  GtInstance g;
  g.id = 4;
  g.class_id = 1;
  g.box = {2, 3, 4, 5};
  g.mask = InstanceMask::Filled(2, 3, 4, 5);
  store.mutable_frame(1).push_back(g);
  WriteTextFile(dir_ / "gt.txt", FormatGroundTruthCsv(store));
  fs::create_directories(dir_ / "masks");
  WriteTextFile(dir_ / "masks" / "000002.txt", FormatMaskFile(store.at(1)));
  const GroundTruthStore back = LoadGroundTruth(dir_ / "gt.txt");
  ASSERT_EQ(back.frame_count(), 2);
  ASSERT_EQ(back.at(1).size(), 1u);
  EXPECT_EQ(back.at(1)[0].box, g.box);
  EXPECT_EQ(back.at(1)[0].class_id, 1);
  EXPECT_EQ(*back.at(1)[0].mask, *g.mask);
  const TrackSet set = ToTrackSet(back);
  EXPECT_TRUE(set[0].empty());
  EXPECT_EQ(set[1][0].id, 4);
}

}  // namespace
}  // namespace flowtrack
