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

// End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "flowtrack/config.h"
#include "flowtrack/detector.h"
#include "flowtrack/metrics.h"
#include "flowtrack/pipeline.h"
#include "flowtrack/rng.h"
#include "flowtrack/slicer.h"
#include "flowtrack/synth.h"
#include "flowtrack/vision.h"
#include "oracles.h"

namespace flowtrack {
namespace {

using Seconds = std::chrono::duration<double>;

struct Verdict {
  bool pass = false;
  std::string detail;
};

SceneSpec BaseScene() {
  RandomSceneOptions o;
  o.width = 1920;
  o.height = 1080;
  o.frames = 200;
  o.objects = 5;
  o.min_size = 90;
  o.max_size = 110;
  o.max_speed = 4.0;
  o.margin = 24;
  o.seed = 2024;
  return MakeRandomScene(o);
}

struct Outcome {
  EvalReport report;
  std::string csv;
  RunSummary summary;
  std::vector<FrameResult> frames;
};

Outcome TrackScene(const SceneRenderer& scene, const GroundTruthStore& truth,
                   Detector* detector, const PipelineConfig& cfg,
                   bool keep_frames = false) {
  int next = 0;
  const int total = scene.spec().frames;
  FrameSource source = [&]() -> std::optional<ImageBuffer> {
    if (next >= total) return std::nullopt;
    return scene.RenderFrame(next++);
  };
  Outcome out;
  ResultCollector collector;
  out.summary = Run(source, detector, cfg, [&](const FrameResult& r) {
    collector.Add(r);
    if (keep_frames) out.frames.push_back(r);
  });
  const auto rows = collector.rows();
  out.csv = FormatResultCsv(rows);
  out.report = Evaluate(ToTrackSet(truth), ToTrackSet(rows, truth.frame_count()));
  return out;
}

class Suite {
 public:
  Suite() : scene_(BaseScene()), truth_(std::make_shared<GroundTruthStore>(scene_.Truth())) {}

  int RunAll() {
    Report(1, "oracle perfection, all windows", [&] { return OraclePerfection(); });
    Report(2, "sparse-probe robustness, 1 window/frame", [&] { return SparseProbe(); });
    Report(3, "noisy oracle degradation over 3 seeds", [&] { return NoisyOracle(); });
    Report(4, "LK accuracy on integer shifts", [&] { return LkAccuracy(); });
    Report(5, "pyramid contract", [&] { return PyramidContract(); });
    Report(6, "metrics oracle equivalence", [&] { return MetricsOracle(); });
    Report(7, "scheduler fairness", [&] { return SchedulerFairness(); });
    Report(8, "speed trend over window budgets", [&] { return SpeedTrend(); });
    Report(9, "determinism", [&] { return Determinism(); });
    Report(10, "lifecycle termination and output filtering", [&] { return Lifecycle(); });
    std::printf("%d/%d criteria passed\n", passed_, passed_ + failed_);
    return failed_ == 0 ? 0 : 1;
  }

 private:
  void Report(int id, const char* name, const std::function<Verdict()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = Seconds(std::chrono::steady_clock::now() - start).count();
    (v.pass ? passed_ : failed_)++;
    std::printf("%s [%d] %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, name,
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }

  PipelineConfig Config(int windows) const {
    PipelineConfig cfg;
    cfg.windows_per_frame = windows;
    return cfg;
  }

  Verdict OraclePerfection() {
    OracleDetector oracle(truth_, {});
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = TrackScene(scene_, *truth_, &oracle, Config(PipelineConfig::kAllWindows));
    const double secs = Seconds(std::chrono::steady_clock::now() - start).count();
    const auto& r = o.report;
    return {r.mota == 1.0 && r.idf1 == 1.0 && secs < 120.0,
            fmt::format("MOTA={:.4f} IDF1={:.4f} FP={} FN={} IDSW={} run={:.1f}s", r.mota,
                        r.idf1, r.fp, r.fn, r.idsw, secs)};
  }

  Verdict SparseProbe() {
    OracleDetector oracle(truth_, {});
    sparse_ = TrackScene(scene_, *truth_, &oracle, Config(1));
    const auto& r = sparse_.report;
    return {r.mota >= 0.95 && r.idf1 >= 0.95,
            fmt::format("MOTA={:.4f} IDF1={:.4f} FP={} FN={} IDSW={}", r.mota, r.idf1,
                        r.fp, r.fn, r.idsw)};
  }

  Verdict NoisyOracle() {
    if (sparse_.csv.empty()) SparseProbe();
    bool ok = true;
    std::string detail = fmt::format("reference MOTA={:.4f};", sparse_.report.mota);
    for (std::uint64_t seed : {1, 2, 3}) {
      OracleNoiseModel noise;
      noise.miss_rate = 0.2;
      noise.box_jitter_sigma = 2.0;
      noise.false_positive_rate = 0.5;
      noise.seed = seed;
      OracleDetector oracle(truth_, noise);
      const Outcome o = TrackScene(scene_, *truth_, &oracle, Config(1));
      ok = ok && o.report.mota < sparse_.report.mota;
      detail += fmt::format(" seed {} MOTA={:.4f} IDF1={:.4f}", seed, o.report.mota,
                            o.report.idf1);
    }
    return {ok, detail};
  }

  Verdict LkAccuracy() {
    const auto start = std::chrono::steady_clock::now();
    constexpr int kSide = 768;
    constexpr int kPairs = 20;
    constexpr int kPointsPerPair = 50;
    KeyedRng rng(4242);
    std::vector<double> errors;
    int failed = 0;
    for (int pair = 0; pair < kPairs; ++pair) {
      int dx = 0, dy = 0;
      do {
        dx = rng.UniformInt(-6, 6);
        dy = rng.UniformInt(-6, 6);
      } while (dx * dx + dy * dy > 36);
      SceneSpec spec;
      spec.width = spec.height = kSide;
      spec.frames = 2;
      spec.seed = 100 + pair;
      spec.camera_drift = {static_cast<double>(dx), static_cast<double>(dy)};
      SceneRenderer renderer(spec);
      const Pyramid prev = BuildPyramid(ToGrayscale(renderer.RenderFrame(0)), 5);
      const Pyramid next = BuildPyramid(ToGrayscale(renderer.RenderFrame(1)), 5);
      std::vector<Vec2> points;
      for (int i = 0; i < kPointsPerPair; ++i) {
        points.push_back({rng.Uniform(64.0, kSide - 64.0), rng.Uniform(64.0, kSide - 64.0)});
      }
      const auto flows = TrackPointsLk(prev, next, points, LkParams{});
      for (const auto& f : flows) {
        if (!f.converged) {
          ++failed;
          errors.push_back(1e9);
          continue;
        }
        errors.push_back(Norm(f.displacement - Vec2{static_cast<double>(dx),
                                                     static_cast<double>(dy)}));
      }
    }
    std::sort(errors.begin(), errors.end());
    const double median = 0.5 * (errors[errors.size() / 2 - 1] + errors[errors.size() / 2]);
    const double worst = errors.back();
    const double secs = Seconds(std::chrono::steady_clock::now() - start).count();
    return {median < 0.25 && worst < 0.5 && secs < 10.0,
            fmt::format("{} points, median={:.4f}px max={:.4f}px failed={} run={:.1f}s",
                        errors.size(), median, worst, failed, secs)};
  }

  Verdict PyramidContract() {
    KeyedRng rng(555);
    double worst_handoff = 0.0;
    int dims_bad = 0;
    for (int i = 0; i < 100; ++i) {
      const int w = rng.UniformInt(40, 420);
      const int h = rng.UniformInt(40, 420);
      int levels = 0;
      while (levels < 5 && (std::min(w, h) >> (levels + 1)) >= 1) ++levels;
      levels = rng.UniformInt(1, levels);
      // Independent ceil-halving oracle.
      std::vector<std::pair<int, int>> expect{{w, h}};
      for (int l = 1; l <= levels; ++l) {
        expect.push_back({(expect.back().first + 1) / 2, (expect.back().second + 1) / 2});
      }
      SceneSpec spec;
      spec.width = w;
      spec.height = h;
      spec.frames = 2;
      spec.seed = 900 + i;
      spec.camera_drift = {rng.Uniform(-3, 3), rng.Uniform(-3, 3)};
      SceneRenderer renderer(spec);
      const Pyramid a = BuildPyramid(ToGrayscale(renderer.RenderFrame(0)), levels);
      const Pyramid b = BuildPyramid(ToGrayscale(renderer.RenderFrame(1)), levels);
      if (PyramidLevelDims(w, h, levels) != expect) ++dims_bad;
      for (int l = 0; l <= levels; ++l) {
        if (a.levels[l].width() != expect[l].first ||
            a.levels[l].height() != expect[l].second) {
          ++dims_bad;
        }
      }
      std::vector<LkLevelTrace> trace;
      LkParams params;
      params.window_radius = 3;
      const FlowResult f =
          TrackPointLk(a, b, {w / 2.0 + 0.3, h / 2.0 - 0.2}, params, &trace);
      // Level L solves in units of 2^-L: the guess entering level L-1 must be
      // twice what level L handed off, so u_L * 2^L is one and the same
      // displacement throughout.
      for (std::size_t k = 0; k + 1 < trace.size(); ++k) {
        const Vec2 doubled = 2.0 * trace[k].refined;
        worst_handoff = std::max(worst_handoff, Norm(trace[k + 1].guess_in - doubled));
      }
      if (!trace.empty()) {
        worst_handoff = std::max(worst_handoff, Norm(trace.front().guess_in));
        if (f.converged) {
          worst_handoff = std::max(worst_handoff, Norm(f.displacement - trace.back().refined));
        }
      }
    }
    return {dims_bad == 0 && worst_handoff <= 1e-9,
            fmt::format("100 sizes, dimension mismatches={} worst hand-off error={:.3g}",
                        dims_bad, worst_handoff)};
  }

  Verdict MetricsOracle() {
    KeyedRng rng(31337);
    int mismatches = 0;
    for (int inst = 0; inst < 200; ++inst) {
      const int frames = rng.UniformInt(1, 6);
      const int ng = rng.UniformInt(0, 4);
      const int np = rng.UniformInt(0, 4);
      TrackSet gt(frames), pred(frames);
      for (int f = 0; f < frames; ++f) {
        std::vector<BoundingBox> placed;
        for (int g = 1; g <= ng; ++g) {
          if (rng.Uniform() < 0.2) continue;
          const BoundingBox b{rng.Uniform(0, 30), rng.Uniform(0, 30), 20, 20};
          gt[f].push_back({g, b});
          placed.push_back(b);
        }
        for (int p = 1; p <= np; ++p) {
          if (rng.Uniform() < 0.2) continue;
          BoundingBox b{rng.Uniform(0, 30), rng.Uniform(0, 30), 20, 20};
          if (!placed.empty() && rng.Uniform() < 0.7) {
            const auto& src = placed[rng.UniformInt(0, static_cast<int>(placed.size()) - 1)];
            b = {src.x + rng.Uniform(-4, 4), src.y + rng.Uniform(-4, 4), 20, 20};
          }
          pred[f].push_back({100 + p, b});
        }
      }
      const EvalReport r = Evaluate(gt, pred);
      oracle::Counts c;
      oracle::BruteMota(gt, pred, c);
      oracle::BruteIdf1(gt, pred, c);
      if (r.fp != c.fp || r.fn != c.fn || r.idsw != c.idsw || r.mota != c.mota ||
          r.idtp != c.idtp || r.idf1 != c.idf1) {
        ++mismatches;
      }
    }
    // One GT object over three frames, predicted as a, a, b with exact boxes.
    const BoundingBox box{10, 10, 50, 50};
    const TrackSet gt{{{1, box}}, {{1, box}}, {{1, box}}};
    const TrackSet pred{{{7, box}}, {{7, box}}, {{8, box}}};
    const EvalReport fixture = Evaluate(gt, pred);
    const bool fixture_ok = std::abs(fixture.mota - 0.6667) <= 0.00005 &&
                            std::abs(fixture.idf1 - 0.6667) <= 0.00005;
    return {mismatches == 0 && fixture_ok,
            fmt::format("200 random instances, mismatches={}; fixture MOTA={:.4f} IDF1={:.4f}",
                        mismatches, fixture.mota, fixture.idf1)};
  }

  Verdict SchedulerFairness() {
    PipelineConfig cfg;
    cfg.windows_per_frame = 1;
    cfg.edge_rate_boost = 4;
    cfg.instance_rate_boost = 4;
    auto windows = SliceGrid(3584, 2048, cfg.window_size, cfg.window_overlap_ratio);
    // No tracked objects: border windows are Edge, interior ones Background.
    ClassifyWindows(windows, {}, 3584, 2048);
    for (int frame = 1; frame <= 100; ++frame) NextWindows(windows, frame, cfg);
    int never = 0;
    double edge = 0, edge_n = 0, bg = 0, bg_n = 0;
    for (const auto& w : windows) {
      if (w.probes == 0) ++never;
      if (w.klass == WindowClass::kEdge) {
        edge += w.probes;
        ++edge_n;
      } else if (w.klass == WindowClass::kBackground) {
        bg += w.probes;
        ++bg_n;
      }
    }
    const double edge_rate = edge / std::max(edge_n, 1.0) / 100.0;
    const double bg_rate = bg / std::max(bg_n, 1.0) / 100.0;

    // Informational: longest gap between probes once the schedule has left
    // its synchronised start, against the sum of boosts.
    auto steady = windows;
    std::vector<int> last(steady.size(), 0);
    int worst_gap = 0, boost_sum = 0;
    for (const auto& w : steady) {
      boost_sum += w.klass == WindowClass::kEdge ? cfg.edge_rate_boost : 1;
    }
    for (int frame = 101; frame <= 2000; ++frame) {
      for (int w : NextWindows(steady, frame, cfg)) {
        if (frame > 400) worst_gap = std::max(worst_gap, frame - last[w]);
        last[w] = frame;
      }
    }
    return {windows.size() == 28 && never == 0 && bg_n > 0 && edge_rate >= 2.0 * bg_rate,
            fmt::format("{} windows, never probed in frames 1-100={}, edge rate={:.3f}, "
                        "background rate={:.3f}; steady-state longest gap={} frames "
                        "(boost sum {})",
                        windows.size(), never, edge_rate, bg_rate, worst_gap, boost_sum)};
  }

  Verdict SpeedTrend() {
    RandomSceneOptions o;
    o.width = 3840;
    o.height = 2160;
    o.frames = 16;
    o.objects = 8;
    o.min_size = 90;
    o.max_size = 110;
    o.max_speed = 4.0;
    o.seed = 77;
    const SceneRenderer scene(MakeRandomScene(o));
    const GroundTruthStore truth = scene.Truth();
    auto store = std::make_shared<GroundTruthStore>(truth);
    std::vector<double> fps;
    std::string detail;
    for (int setting : {1, 2, 4, 8, 16, PipelineConfig::kAllWindows}) {
      StubDetector stub(std::chrono::milliseconds(20),
                        std::make_shared<OracleDetector>(store, OracleNoiseModel{}));
      const Outcome out = TrackScene(scene, truth, &stub, Config(setting));
      fps.push_back(out.summary.fps);
      detail += fmt::format("{}={:.2f} ", setting == PipelineConfig::kAllWindows
                                              ? std::string("all")
                                              : std::to_string(setting),
                            out.summary.fps);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < fps.size(); ++i) decreasing = decreasing && fps[i] < fps[i - 1];
    const double ratio = fps.front() / fps.back();
    return {decreasing && ratio >= 2.5,
            fmt::format("fps {}ratio={:.2f}", detail, ratio)};
  }

  Verdict Determinism() {
    if (sparse_.csv.empty()) SparseProbe();
    OracleDetector oracle(truth_, {});
    const Outcome again = TrackScene(scene_, *truth_, &oracle, Config(1));
    const bool same = again.csv == sparse_.csv;
    return {same && !again.csv.empty(),
            fmt::format("{} bytes, byte-identical={}", again.csv.size(), same ? "yes" : "no")};
  }

  Verdict Lifecycle() {
    SceneSpec spec = BaseScene();
    spec.frames = 120;
    constexpr int kRemoval = 50;
    spec.objects[0].visible_until = kRemoval;
    const SceneRenderer scene(spec);
    const GroundTruthStore truth = scene.Truth();
    auto store = std::make_shared<GroundTruthStore>(truth);
    OracleNoiseModel noise;
    noise.false_positive_rate = 0.3;
    noise.seed = 9;
    OracleDetector oracle(store, noise);
    PipelineConfig cfg = Config(1);
    const Outcome out = TrackScene(scene, truth, &oracle, cfg, true);

    // The tracklet following object 1 is the one whose box best overlaps it
    // on the last visible frame.
    const auto& last_gt = truth.at(kRemoval - 1);
    const auto gt_it = std::find_if(last_gt.begin(), last_gt.end(),
                                    [](const GtInstance& g) { return g.id == 1; });
    if (gt_it == last_gt.end()) return {false, "object 1 absent before removal"};
    TrackletId target = 0;
    double best = 0.0;
    double conf_at_removal = 0.0;
    for (const auto& row : out.frames[kRemoval - 1].rows) {
      const double iou = oracle::BoxIou(row.box, gt_it->box);
      if (iou > best) {
        best = iou;
        target = row.id;
        conf_at_removal = row.confidence;
      }
    }
    if (target == 0) return {false, "no tracklet on object 1 at removal"};

    const auto& windows = SliceGrid(spec.width, spec.height, cfg.window_size,
                                    cfg.window_overlap_ratio);
    int probes = 0;
    int terminated_at = -1;
    for (int f = kRemoval; f < spec.frames; ++f) {
      const FrameResult& r = out.frames[f];
      const auto it = std::find_if(r.rows.begin(), r.rows.end(),
                                   [&](const OutputRow& row) { return row.id == target; });
      const auto& prev_rows = out.frames[f - 1].rows;
      const auto prev = std::find_if(prev_rows.begin(), prev_rows.end(),
                                     [&](const OutputRow& row) { return row.id == target; });
      if (prev != prev_rows.end()) {
        const Vec2 c = BoxCenter(prev->box);
        for (int w : r.probed_windows) {
          if (BoxContains(windows[w].rect, c)) {
            ++probes;
            break;
          }
        }
      }
      if (it == r.rows.end()) {
        terminated_at = f;
        break;
      }
    }
    const double bound = std::ceil((conf_at_removal + 1.0 - cfg.conf_terminate_threshold) /
                                   cfg.conf_required_per_detection);

    std::set<TrackletId> ever_confident;
    std::set<TrackletId> ever_seen;
    for (const auto& r : out.frames) {
      for (const auto& row : r.rows) {
        ever_seen.insert(row.id);
        if (row.label == 1) ever_confident.insert(row.id);
      }
    }
    int spurious_in_output = 0;
    for (const auto& row : ParseMotCsv(out.csv)) {
      if (!ever_confident.count(row.id)) ++spurious_in_output;
    }
    const int never_confirmed =
        static_cast<int>(ever_seen.size() - ever_confident.size());
    return {terminated_at >= 0 && probes <= bound && spurious_in_output == 0 &&
                never_confirmed > 0,
            fmt::format("terminated at frame {} after {} probes (bound {}), "
                        "{} never-confirmed tracklets, {} of their rows in output",
                        terminated_at, probes, bound, never_confirmed,
                        spurious_in_output)};
  }

  SceneRenderer scene_;
  std::shared_ptr<GroundTruthStore> truth_;
  Outcome sparse_;
  int passed_ = 0;
  int failed_ = 0;
};

}  // namespace
}  // namespace flowtrack

int main() {
  flowtrack::Suite suite;
  return suite.RunAll();
}
