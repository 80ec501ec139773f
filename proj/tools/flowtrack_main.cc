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

// Command-line front end: track, eval, bench and synth.

#include <omp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/format.h>

#include "flowtrack/config.h"
#include "flowtrack/detector.h"
#include "flowtrack/image_io.h"
#include "flowtrack/metrics.h"
#include "flowtrack/mot_io.h"
#include "flowtrack/pipeline.h"
#include "flowtrack/synth.h"

#ifndef FLOWTRACK_VERSION
#define FLOWTRACK_VERSION "unknown"
#endif

namespace fs = std::filesystem;

namespace flowtrack {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitDetector = 4;

// Thrown inside a subcommand to leave with a specific exit code.
struct ExitWith {
  int code;
  std::string message;
};

std::string Timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

std::string FlagName(const std::string& key) {
  std::string flag = "--" + key;
  for (char& c : flag) {
    if (c == '_') c = '-';
  }
  return flag;
}

// Config file first, then one flag per PipelineConfig key on top.
struct ConfigFlags {
  std::string file;
  std::map<std::string, std::string> values;

  void Register(CLI::App* app) {
    app->add_option("--config", file,
                    "Config file of `key = value` lines; flags override it");
    const PipelineConfig defaults;
    for (const auto& key : ConfigKeys()) {
      app->add_option(FlagName(key), values[key],
                      fmt::format("Override `{}` (default {})", key,
                                  GetConfigValue(defaults, key)));
    }
  }

  PipelineConfig Resolve() const {
    PipelineConfig cfg;
    try {
      if (!file.empty()) cfg = LoadConfig(file);
      for (const auto& [key, value] : values) {
        if (!value.empty()) SetConfigValue(cfg, key, value);
      }
      Validate(cfg);
    } catch (const IoError& e) {
      throw ExitWith{kExitIo, e.what()};
    } catch (const ConfigError& e) {
      throw ExitWith{kExitUsage, e.what()};
    }
    return cfg;
  }
};

void SetThreads(int threads) {
  if (threads > 0) omp_set_num_threads(threads);
}

std::vector<fs::path> FramePaths(const std::string& dir) {
  std::vector<fs::path> frames;
  try {
    frames = ListFrames(dir);
  } catch (const IoError& e) {
    throw ExitWith{kExitIo, e.what()};
  }
  if (frames.empty()) {
    throw ExitWith{kExitIo, fmt::format("no .ppm/.pgm frames in {}", dir)};
  }
  return frames;
}

std::shared_ptr<Detector> BuildDetector(const std::string& spec, int timeout_ms) {
  try {
    return MakeDetector(spec, std::chrono::milliseconds(timeout_ms));
  } catch (const std::invalid_argument& e) {
    throw ExitWith{kExitUsage, e.what()};
  } catch (const IoError& e) {
    throw ExitWith{kExitIo, e.what()};
  } catch (const MotFormatError& e) {
    throw ExitWith{kExitIo, e.what()};
  } catch (const DetectorError& e) {
    throw ExitWith{kExitDetector, e.what()};
  }
}

FrameSource DiskSource(const std::vector<fs::path>& paths) {
  auto next = std::make_shared<std::size_t>(0);
  return [paths, next]() -> std::optional<ImageBuffer> {
    if (*next >= paths.size()) return std::nullopt;
    return ReadPnm(paths[(*next)++]);
  };
}

// Runs the tracker over a frame directory. Detector failures on the first
// frame map to the detector exit code.
RunSummary TrackFrames(const std::vector<fs::path>& frames, Detector* detector,
                       const PipelineConfig& cfg, const FrameSink& sink) {
  try {
    return Run(DiskSource(frames), detector, cfg, sink);
  } catch (const DetectorError& e) {
    throw ExitWith{kExitDetector, fmt::format("detector failed on frame 1: {}", e.what())};
  } catch (const IoError& e) {
    throw ExitWith{kExitIo, e.what()};
  } catch (const ImageTooSmall& e) {
    throw ExitWith{kExitUsage, e.what()};
  }
}

void WriteOutput(const fs::path& path, const std::string& text) {
  try {
    WriteTextFile(path, text);
  } catch (const IoError& e) {
    throw ExitWith{kExitIo, e.what()};
  }
}

struct TrackArgs {
  std::string frames;
  std::string detector;
  std::string out;
  int threads = 0;
  int timeout_ms = 30000;
  bool no_backfill = false;
  ConfigFlags config;
};

int CmdTrack(const TrackArgs& args, const std::vector<std::string>& argv) {
  const std::string started = Timestamp();
  SetThreads(args.threads);
  const PipelineConfig cfg = args.config.Resolve();
  const auto frames = FramePaths(args.frames);
  const auto detector = BuildDetector(args.detector, args.timeout_ms);
  std::error_code ec;
  fs::create_directories(args.out, ec);
  if (ec) {
    throw ExitWith{kExitIo, fmt::format("cannot create {}: {}", args.out, ec.message())};
  }

  ResultCollector collector(!args.no_backfill);
  const RunSummary summary =
      TrackFrames(frames, detector.get(), cfg,
                  [&](const FrameResult& r) {
                    collector.Add(r);
                    if (r.degraded) {
                      std::cerr << fmt::format("frame {}: detector degraded: {}\n",
                                               r.frame_index + 1, r.degradation);
                    }
                  });
  const fs::path out(args.out);
  WriteOutput(out / "results.txt", FormatResultCsv(collector.rows()));
  WriteOutput(out / "timing.txt", FormatTiming(summary));

  std::string manifest = fmt::format(
      "version = {}\nstarted = {}\nfinished = {}\nframes_dir = {}\nframes = {}\n"
      "detector = {}\nbackfill = {}\nthreads = {}\ncommand =",
      FLOWTRACK_VERSION, started, Timestamp(), fs::absolute(args.frames).string(),
      frames.size(), args.detector, args.no_backfill ? "off" : "on", args.threads);
  for (const auto& a : argv) manifest += " " + a;
  manifest += "\n# resolved config\n" + FormatConfig(cfg);
  WriteOutput(out / "manifest.txt", manifest);

  std::cout << fmt::format("{} frames, {:.2f} fps, {} confident rows -> {}\n",
                           summary.frames, summary.fps, collector.rows().size(),
                           (out / "results.txt").string());
  return kExitOk;
}

struct EvalArgs {
  std::string gt;
  std::string result;
  std::string report;
  std::string csv;
  std::string name;
};

int CmdEval(const EvalArgs& args) {
  GroundTruthStore gt;
  std::vector<MotRow> rows;
  for (const auto* path : {&args.gt, &args.result}) {
    std::error_code ec;
    if (!fs::exists(*path, ec)) {
      throw ExitWith{kExitIo, fmt::format("no such file: {}", *path)};
    }
  }
  try {
    gt = LoadGroundTruth(args.gt);
    rows = LoadMotCsv(args.result);
  } catch (const MotFormatError& e) {
    throw ExitWith{kExitUsage, e.what()};
  } catch (const IoError& e) {
    throw ExitWith{kExitIo, e.what()};
  } catch (const std::invalid_argument& e) {
    throw ExitWith{kExitUsage, e.what()};
  }
  const int frames = gt.frame_count();
  for (const auto& r : rows) {
    if (r.frame >= frames) {
      throw ExitWith{kExitUsage,
                     fmt::format("result frame {} outside the ground-truth range 1..{}",
                                 r.frame + 1, frames)};
    }
  }
  const std::string name =
      args.name.empty() ? fs::path(args.gt).parent_path().filename().string() : args.name;
  const EvalReport report =
      Evaluate(ToTrackSet(gt), ToTrackSet(rows, frames), name.empty() ? "sequence" : name);
  const std::string text = FormatReport(report);
  std::cout << text;
  if (!args.report.empty()) WriteOutput(args.report, text);
  if (!args.csv.empty()) {
    WriteOutput(args.csv, ReportCsvHeader() + "\n" + ReportCsvRow(report) + "\n");
  }
  return kExitOk;
}

struct BenchArgs {
  std::string frames;
  std::string detector = "stub:20";
  std::string settings = "1,2,4,8,16,all";
  std::string csv;
  int threads = 0;
  int timeout_ms = 30000;
  ConfigFlags config;
};

std::vector<int> ParseSettings(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    PipelineConfig probe;
    try {
      SetConfigValue(probe, "windows_per_frame", item);
    } catch (const ConfigError& e) {
      throw ExitWith{kExitUsage, fmt::format("--settings: {}", e.what())};
    }
    if (probe.windows_per_frame < 1) {
      throw ExitWith{kExitUsage, "--settings: window counts must be positive"};
    }
    out.push_back(probe.windows_per_frame);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

int CmdBench(const BenchArgs& args) {
  SetThreads(args.threads);
  const PipelineConfig base = args.config.Resolve();
  const auto settings = ParseSettings(args.settings);
  const auto frames = FramePaths(args.frames);
  std::string table = fmt::format("{:>18} {:>8} {:>10} {:>10}\n", "windows_per_frame",
                                  "frames", "seconds", "fps");
  std::string csv = "windows_per_frame,frames,seconds,fps\n";
  for (int setting : settings) {
    PipelineConfig cfg = base;
    cfg.windows_per_frame = setting;
    const auto detector = BuildDetector(args.detector, args.timeout_ms);
    const RunSummary s = TrackFrames(frames, detector.get(), cfg, {});
    const std::string label = setting == PipelineConfig::kAllWindows
                                  ? std::string("all")
                                  : std::to_string(setting);
    table += fmt::format("{:>18} {:>8} {:>10.3f} {:>10.3f}\n", label, s.frames,
                         s.seconds, s.fps);
    csv += fmt::format("{},{},{:.6f},{:.6f}\n", label, s.frames, s.seconds, s.fps);
  }
  std::cout << table;
  if (!args.csv.empty()) WriteOutput(args.csv, csv);
  return kExitOk;
}

struct SynthArgs {
  std::string out;
  std::string spec;
  std::uint64_t seed = 1;
  RandomSceneOptions scene;
};

int CmdSynth(const SynthArgs& args) {
  SceneSpec spec;
  try {
    if (!args.spec.empty()) {
      spec = ParseSceneSpec(ReadTextFile(args.spec));
    } else {
      RandomSceneOptions opt = args.scene;
      opt.seed = args.seed;
      spec = MakeRandomScene(opt);
    }
  } catch (const SceneError& e) {
    throw ExitWith{kExitUsage, e.what()};
  } catch (const IoError& e) {
    throw ExitWith{kExitIo, e.what()};
  }
  try {
    WriteSequence(spec, args.out);
  } catch (const IoError& e) {
    throw ExitWith{kExitIo, e.what()};
  }
  std::cout << fmt::format("{} frames of {}x{} with {} objects -> {}\n", spec.frames,
                           spec.width, spec.height, spec.objects.size(), args.out);
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"Sparse-flow multi-object tracker with scheduled window re-detection"};
  app.set_version_flag("--version", FLOWTRACK_VERSION);
  app.require_subcommand(1);

  TrackArgs track;
  auto* cmd_track = app.add_subcommand(
      "track", "Track objects through a frame directory. Config-file values are "
               "overridden by flags.");
  cmd_track->add_option("--frames", track.frames, "Directory of .ppm/.pgm frames")
      ->required();
  cmd_track->add_option("--detector", track.detector,
                        "oracle:<gt.txt>[:miss=,fp=,jitter=,conf=lo-hi,seed=], "
                        "exec:<command> or stub:<ms>[:<inner>]")
      ->required();
  cmd_track->add_option("--out", track.out, "Output directory")->required();
  cmd_track->add_option("--threads", track.threads, "Worker cap, 0 = auto");
  cmd_track->add_option("--timeout-ms", track.timeout_ms,
                        "External detector reply timeout");
  cmd_track->add_flag("--no-backfill", track.no_backfill,
                      "Only write rows produced while a tracklet is confident");
  track.config.Register(cmd_track);

  EvalArgs eval;
  auto* cmd_eval = app.add_subcommand("eval", "Score a result file against ground truth");
  cmd_eval->add_option("gt", eval.gt, "Ground-truth MOT CSV")->required();
  cmd_eval->add_option("result", eval.result, "Result MOT CSV")->required();
  cmd_eval->add_option("--report", eval.report, "Also write the report here");
  cmd_eval->add_option("--csv", eval.csv, "Write a one-row CSV summary here");
  cmd_eval->add_option("--name", eval.name, "Sequence name in the report");

  BenchArgs bench;
  auto* cmd_bench = app.add_subcommand(
      "bench", "Tracking fps for several window budgets. Config-file values are "
               "overridden by flags.");
  cmd_bench->add_option("--frames", bench.frames, "Directory of .ppm/.pgm frames")
      ->required();
  cmd_bench->add_option("--detector", bench.detector, "Detector spec, as for track")
      ->capture_default_str();
  cmd_bench->add_option("--settings", bench.settings,
                        "Comma-separated windows_per_frame values, `all` allowed")
      ->capture_default_str();
  cmd_bench->add_option("--csv", bench.csv, "Write the table as CSV here");
  cmd_bench->add_option("--threads", bench.threads, "Worker cap, 0 = auto");
  cmd_bench->add_option("--timeout-ms", bench.timeout_ms,
                        "External detector reply timeout");
  bench.config.Register(cmd_bench);

  SynthArgs synth;
  auto* cmd_synth = app.add_subcommand(
      "synth", "Render a synthetic sequence with ground truth. Without --spec a "
               "random scene is drawn from the inline flags.");
  cmd_synth->add_option("--out", synth.out, "Output directory")->required();
  cmd_synth->add_option("--spec", synth.spec, "Scene spec file");
  cmd_synth->add_option("--seed", synth.seed, "Scene seed")->capture_default_str();
  cmd_synth->add_option("--width", synth.scene.width)->capture_default_str();
  cmd_synth->add_option("--height", synth.scene.height)->capture_default_str();
  cmd_synth->add_option("--frames", synth.scene.frames)->capture_default_str();
  cmd_synth->add_option("--objects", synth.scene.objects)->capture_default_str();
  cmd_synth->add_option("--min-size", synth.scene.min_size)->capture_default_str();
  cmd_synth->add_option("--max-size", synth.scene.max_size)->capture_default_str();
  cmd_synth->add_option("--max-speed", synth.scene.max_speed, "px per frame")
      ->capture_default_str();
  cmd_synth->add_flag("--stripes", synth.scene.allow_stripes,
                      "Allow striped object textures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*cmd_track) return CmdTrack(track, std::vector<std::string>(argv, argv + argc));
    if (*cmd_eval) return CmdEval(eval);
    if (*cmd_bench) return CmdBench(bench);
    if (*cmd_synth) return CmdSynth(synth);
  } catch (const ExitWith& e) {
    std::cerr << "flowtrack: " << e.message << "\n";
    return e.code;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace flowtrack

int main(int argc, char** argv) { return flowtrack::Main(argc, argv); }
