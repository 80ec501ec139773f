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
#include <functional>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "flowtrack/assignment.h"
#include "flowtrack/metrics.h"
#include "oracles.h"

namespace flowtrack {
namespace {

TrackBox Box(TrackletId id, double x, double y = 0, double w = 10, double h = 10) {
  return {id, {x, y, w, h}};
}

TEST(FrameMatchTest, IdenticalAndGated) {
  const std::vector<TrackBox> gt = {Box(1, 0), Box(2, 50)};
  EXPECT_EQ(FrameMatch(gt, gt, {}).size(), 2u);
  // (10 - d) / (10 + d) = 0.4 at d = 30/7.
  const std::vector<TrackBox> off = {Box(9, 30.0 / 7.0)};
  EXPECT_TRUE(FrameMatch(std::vector<TrackBox>{Box(1, 0)}, off, {}).empty());
}

TEST(FrameMatchTest, CrossoverPrefersOptimal) {
  // Greedy on IoU takes g0-p0 (0.905) and strands g1; the optimum pairs both.
  const std::vector<TrackBox> gt = {Box(1, 10.5), Box(2, 7.5)};
  const std::vector<TrackBox> pred = {Box(7, 10), Box(8, 13)};
  auto pairs = FrameMatch(gt, pred, {});
  std::sort(pairs.begin(), pairs.end());
  const std::vector<std::pair<int, int>> want = {{0, 1}, {1, 0}};
  EXPECT_EQ(pairs, want);
  auto brute = oracle::BestFrameMatching(gt, pred, {true, true}, {true, true});
  std::sort(brute.begin(), brute.end());
  EXPECT_EQ(brute, want);
}

TEST(FrameMatchTest, KeepsPriorPair) {
  const std::vector<TrackBox> gt = {Box(1, 0)};
  const std::vector<TrackBox> pred = {Box(5, 0.2), Box(6, 2)};
  const auto pairs = FrameMatch(gt, pred, {{1, 6}});
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0], std::make_pair(0, 1));
}

TEST(EvaluateTest, PerfectTracking) {
  TrackSet gt = {{Box(1, 0), Box(2, 40)}, {Box(1, 2), Box(2, 42)}};
  const EvalReport r = Evaluate(gt, gt);
  EXPECT_DOUBLE_EQ(r.mota, 1.0);
  EXPECT_DOUBLE_EQ(r.idf1, 1.0);
  EXPECT_EQ(r.fp + r.fn + r.idsw, 0);
}

TEST(EvaluateTest, SwitchFixture) {
  const TrackSet gt = {{Box(1, 0)}, {Box(1, 0)}, {Box(1, 0)}};
  const TrackSet pred = {{Box(10, 0)}, {Box(10, 0)}, {Box(11, 0)}};
  const EvalReport r = Evaluate(gt, pred);
  EXPECT_EQ(r.idsw, 1);
  EXPECT_NEAR(r.mota, 1.0 - 1.0 / 3.0, 1e-12);
  EXPECT_EQ(r.idtp, 2);
  EXPECT_EQ(r.idfp, 1);
  EXPECT_EQ(r.idfn, 1);
  EXPECT_NEAR(r.idf1, 4.0 / 6.0, 1e-12);
}

TEST(EvaluateTest, EmptyPredictions) {
  TrackSet gt(10);
  for (int f = 0; f < 10; ++f) gt[f].push_back(Box(1, f));
  const EvalReport r = Evaluate(gt, TrackSet(10));
  EXPECT_EQ(r.fn, 10);
  EXPECT_DOUBLE_EQ(r.mota, 0.0);
  EXPECT_DOUBLE_EQ(r.idf1, 0.0);
  const EvalReport none = Evaluate(TrackSet(3), TrackSet(3));
  EXPECT_DOUBLE_EQ(none.mota, 1.0);
  EXPECT_DOUBLE_EQ(none.idf1, 1.0);
}

TrackSet RandomTracks(std::mt19937& rng, int frames, int ids) {
  std::uniform_real_distribution<double> jit(-3, 3);
  std::uniform_int_distribution<int> pick(1, ids);
  TrackSet s(frames);
  for (int f = 0; f < frames; ++f) {
    std::vector<bool> used(ids + 1, false);
    const int n = pick(rng) - (rng() % 2);
    for (int k = 0; k < n; ++k) {
      const int id = pick(rng);
      if (used[id]) continue;
      used[id] = true;
      s[f].push_back(Box(id, 20.0 * (rng() % 3) + jit(rng), jit(rng)));
    }
  }
  return s;
}

TEST(EvaluateTest, AgreesWithBruteForce) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const TrackSet gt = RandomTracks(rng, 5, 3);
    const TrackSet pred = RandomTracks(rng, 5, 4);
    oracle::Counts c;
    oracle::BruteMota(gt, pred, c);
    oracle::BruteIdf1(gt, pred, c);
    const EvalReport r = Evaluate(gt, pred);
    ASSERT_EQ(r.fp, c.fp) << trial;
    ASSERT_EQ(r.fn, c.fn) << trial;
    ASSERT_EQ(r.idsw, c.idsw) << trial;
    ASSERT_NEAR(r.mota, c.mota, 1e-12) << trial;
    ASSERT_EQ(r.idtp, c.idtp) << trial;
    ASSERT_NEAR(r.idf1, c.idf1, 1e-12) << trial;
  }
}

TEST(EvaluateTest, RelabelInvariantAndFalsePositivesHurt) {
  std::mt19937 rng(5);
  const TrackSet gt = RandomTracks(rng, 8, 3);
  TrackSet pred = gt;
  for (auto& f : pred) {
    for (auto& b : f) b.box.x += 1.0;
  }
  TrackSet relabelled = pred;
  for (auto& f : relabelled) {
    for (auto& b : f) b.id = 100 - b.id;
  }
  const EvalReport a = Evaluate(gt, pred), b = Evaluate(gt, relabelled);
  EXPECT_DOUBLE_EQ(a.mota, b.mota);
  EXPECT_DOUBLE_EQ(a.idf1, b.idf1);
  TrackSet noisy = pred;
  noisy[2].push_back(Box(77, 300, 300));
  const EvalReport c = Evaluate(gt, noisy);
  EXPECT_LT(c.mota, a.mota);
  EXPECT_LT(c.idf1, a.idf1);
}

TEST(ReportTest, Formats) {
  const TrackSet gt = {{Box(1, 0)}};
  const EvalReport r = Evaluate(gt, gt, "seq");
  EXPECT_NE(FormatReport(r).find("1.0000"), std::string::npos);
  EXPECT_EQ(ReportCsvHeader(), "sequence,frames,mota,idf1,gt,pred,fp,fn,idsw,idtp,idfp,idfn");
  EXPECT_EQ(ReportCsvRow(r).rfind("seq,1,1.0000,1.0000,1,1,0,0,0,1,0,0", 0), 0u);
}

double BruteMinCost(const CostMatrix& m) {
  const int n = std::max(m.rows, m.cols);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = 1e300;
  do {
    double s = 0;
    for (int r = 0; r < m.rows; ++r) {
      if (perm[r] < m.cols) s += m.at(r, perm[r]);
    }
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

TEST(AssignmentTest, MatchesBruteForce) {
  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(0, 10);
  for (int trial = 0; trial < 200; ++trial) {
    const int rows = 1 + rng() % 5, cols = 1 + rng() % 5;
    CostMatrix m(rows, cols);
    for (auto& c : m.cost) c = u(rng);
    const auto a = SolveAssignment(m);
    ASSERT_EQ(static_cast<int>(a.size()), rows);
    double s = 0;
    std::vector<bool> used(cols, false);
    int assigned = 0;
    for (int r = 0; r < rows; ++r) {
      if (a[r] < 0) continue;
      ASSERT_FALSE(used[a[r]]);
      used[a[r]] = true;
      s += m.at(r, a[r]);
      ++assigned;
    }
    EXPECT_EQ(assigned, std::min(rows, cols));
    EXPECT_NEAR(s, BruteMinCost(m), 1e-9);
  }
}

}  // namespace
}  // namespace flowtrack
