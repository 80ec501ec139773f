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

#ifndef FLOWTRACK_DETECTOR_H_
#define FLOWTRACK_DETECTOR_H_

#include <chrono>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flowtrack/core.h"
#include "flowtrack/mot_io.h"

namespace flowtrack {

class DetectorError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
// No answer within the timeout, or the process could not be started.
class DetectorUnavailable : public DetectorError {
 public:
  using DetectorError::DetectorError;
};
// A response line did not parse; what() quotes it.
class ProtocolError : public DetectorError {
 public:
  ProtocolError(const std::string& what, std::string line)
      : DetectorError(what), line_(std::move(line)) {}
  const std::string& line() const { return line_; }

 private:
  std::string line_;
};
// The detector closed its end of the pipe.
class DetectorClosed : public DetectorError {
 public:
  using DetectorError::DetectorError;
};

struct DetectRequest {
  const ImageBuffer& frame;
  BoundingBox region;  // integer-aligned window inside the frame
  int frame_index = 0;
  int window_index = 0;
};

// A detector sees one region of one frame and answers in region-local
// coordinates. It never reads tracker state.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<Detection> Detect(const DetectRequest& request) = 0;
};

struct OracleNoiseModel {
  double miss_rate = 0.0;
  double false_positive_rate = 0.0;  // expected spurious detections per call
  double box_jitter_sigma = 0.0;     // pixels, per box edge
  double confidence_lo = 0.9;
  double confidence_hi = 0.9;
  std::uint64_t seed = 0;
};

// Parses "miss=0.2,fp=0.5,jitter=2,conf=0.5-0.95,seed=7"; any subset of keys.
// Throws std::invalid_argument on unknown keys or out-of-range values.
OracleNoiseModel ParseNoiseSpec(std::string_view spec);
std::string FormatNoiseSpec(const OracleNoiseModel& noise);

// Emits ground-truth instances whose box centre lies in the window, degraded
// by the noise model. Randomness is keyed by (seed, frame, window), so calls
// can happen in any order or concurrently and still replay exactly.
class OracleDetector : public Detector {
 public:
  OracleDetector(std::shared_ptr<const GroundTruthStore> store,
                 OracleNoiseModel noise);

  // Frames beyond the store hold no instances.
  std::vector<Detection> Detect(const DetectRequest& request) override;

  const OracleNoiseModel& noise() const { return noise_; }

 private:
  std::shared_ptr<const GroundTruthStore> store_;
  OracleNoiseModel noise_;
};

// Fixed per-call latency in front of an optional inner detector; with no
// inner detector it answers with nothing. Stands in for a network of known
// cost in throughput benchmarks.
class StubDetector : public Detector {
 public:
  explicit StubDetector(std::chrono::microseconds delay,
                        std::shared_ptr<Detector> inner = nullptr);

  std::vector<Detection> Detect(const DetectRequest& request) override;

 private:
  std::chrono::microseconds delay_;
  std::shared_ptr<Detector> inner_;
};

// Child process speaking the line protocol on stdin/stdout:
//   request:  "DETECT <frame_idx> <w> <h>\n" then w*h*3 bytes of RGB
//   response: "OK <n>\n" then n lines "<class> <x> <y> <w> <h> <conf> <rle>"
// with region-local boxes; <rle> may be "-" for a maskless detection.
class ExternalDetector : public Detector {
 public:
  // Runs `command` through /bin/sh. Throws DetectorUnavailable on failure.
  ExternalDetector(const std::string& command,
                   std::chrono::milliseconds timeout);
  ~ExternalDetector() override;

  ExternalDetector(const ExternalDetector&) = delete;
  ExternalDetector& operator=(const ExternalDetector&) = delete;

  std::vector<Detection> Detect(const DetectRequest& request) override;

 private:
  void WriteAll(const void* data, std::size_t size);
  std::string ReadLine();

  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::chrono::milliseconds timeout_;
  std::chrono::steady_clock::time_point deadline_;
};

// Parses a full response (header plus records). Exposed for tests.
std::vector<Detection> ParseDetectorResponse(std::string_view header,
                                             const std::vector<std::string>& records);
Detection ParseDetectionRecord(std::string_view line);
std::string FormatDetectionRecord(const Detection& det);

// Crop of the region as tightly packed RGB (luma frames are replicated).
std::vector<std::uint8_t> RegionRgb(const ImageBuffer& frame,
                                    const BoundingBox& region);

// Builds a detector from its command-line form:
//   oracle:<gt.txt>[:<noise spec>]
//   exec:<shell command>
//   stub:<ms>[:<inner spec>]
// Throws std::invalid_argument for a malformed spec, IoError or
// MotFormatError when ground truth cannot be read, DetectorError when a
// child process cannot be started.
std::shared_ptr<Detector> MakeDetector(const std::string& spec,
                                       std::chrono::milliseconds timeout);

}  // namespace flowtrack

#endif  // FLOWTRACK_DETECTOR_H_
