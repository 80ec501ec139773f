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

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <sstream>

#include <fmt/format.h>

#include "flowtrack/detector.h"
#include "flowtrack/rle.h"

namespace flowtrack {
namespace {

int RemainingMs(std::chrono::steady_clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
  return left.count() > 0 ? static_cast<int>(left.count()) : 0;
}

double ParseReal(const std::string& tok, std::string_view line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size() || tok.empty() || !std::isfinite(v)) {
    throw ProtocolError(
        fmt::format("bad number '{}' in detection record '{}'", tok, line),
        std::string(line));
  }
  return v;
}

}  // namespace

std::vector<std::uint8_t> RegionRgb(const ImageBuffer& frame,
                                    const BoundingBox& region) {
  const int x0 = static_cast<int>(region.x);
  const int y0 = static_cast<int>(region.y);
  const int w = static_cast<int>(region.w);
  const int h = static_cast<int>(region.h);
  std::vector<std::uint8_t> out;
  out.reserve(static_cast<std::size_t>(w) * h * 3);
  for (int y = y0; y < y0 + h; ++y) {
    const std::uint8_t* row = frame.row(y);
    for (int x = x0; x < x0 + w; ++x) {
      if (frame.channels() == 3) {
        out.insert(out.end(), row + 3 * x, row + 3 * x + 3);
      } else {
        out.insert(out.end(), 3, row[x]);
      }
    }
  }
  return out;
}

Detection ParseDetectionRecord(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::vector<std::string> tok;
  for (std::string t; in >> t;) tok.push_back(t);
  if (tok.size() != 6 && tok.size() != 7) {
    throw ProtocolError(
        fmt::format("detection record needs 6 or 7 fields: '{}'", line),
        std::string(line));
  }
  Detection det;
  const double cls = ParseReal(tok[0], line);
  if (cls != std::floor(cls) || cls < 0) {
    throw ProtocolError(fmt::format("bad class in detection record '{}'", line),
                        std::string(line));
  }
  det.class_id = static_cast<int>(cls);
  det.box = {ParseReal(tok[1], line), ParseReal(tok[2], line),
             ParseReal(tok[3], line), ParseReal(tok[4], line)};
  det.confidence = ParseReal(tok[5], line);
  if (!det.box.valid()) {
    throw ProtocolError(
        fmt::format("non-positive box extent in detection record '{}'", line),
        std::string(line));
  }
  if (det.confidence < 0.0 || det.confidence > 1.0) {
    throw ProtocolError(
        fmt::format("confidence outside [0,1] in detection record '{}'", line),
        std::string(line));
  }
  if (tok.size() == 7 && tok[6] != "-") {
    try {
      det.mask = ParseMaskRle(tok[6], static_cast<int>(std::floor(det.box.x)),
                              static_cast<int>(std::floor(det.box.y)));
    } catch (const std::exception& e) {
      throw ProtocolError(
          fmt::format("bad mask in detection record '{}': {}", line, e.what()),
          std::string(line));
    }
  }
  return det;
}

std::string FormatDetectionRecord(const Detection& det) {
  return fmt::format("{} {} {} {} {} {} {}", det.class_id, FormatNumber(det.box.x),
                     FormatNumber(det.box.y), FormatNumber(det.box.w),
                     FormatNumber(det.box.h), FormatNumber(det.confidence),
                     det.mask ? EncodeMaskRle(*det.mask) : std::string("-"));
}

std::vector<Detection> ParseDetectorResponse(
    std::string_view header, const std::vector<std::string>& records) {
  std::istringstream in{std::string(header)};
  std::string ok;
  long long n = -1;
  std::string extra;
  if (!(in >> ok >> n) || ok != "OK" || n < 0 || (in >> extra)) {
    throw ProtocolError(fmt::format("bad response header '{}'", header),
                        std::string(header));
  }
  if (static_cast<std::size_t>(n) != records.size()) {
    throw ProtocolError(
        fmt::format("header announced {} records, got {}", n, records.size()),
        std::string(header));
  }
  std::vector<Detection> out;
  for (const auto& r : records) out.push_back(ParseDetectionRecord(r));
  return out;
}

ExternalDetector::ExternalDetector(const std::string& command,
                                   std::chrono::milliseconds timeout)
    : timeout_(timeout) {
  // A dead child must surface as EPIPE, not kill the tracker.
  ::signal(SIGPIPE, SIG_IGN);
  int in_pipe[2], out_pipe[2];
  if (::pipe(in_pipe) != 0 || ::pipe(out_pipe) != 0) {
    throw DetectorUnavailable(
        fmt::format("pipe() failed: {}", std::strerror(errno)));
  }
  pid_ = ::fork();
  if (pid_ < 0) {
    throw DetectorUnavailable(
        fmt::format("fork() failed: {}", std::strerror(errno)));
  }
  if (pid_ == 0) {
    ::dup2(in_pipe[0], STDIN_FILENO);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    ::close(out_pipe[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  to_child_ = in_pipe[1];
  from_child_ = out_pipe[0];
  ::fcntl(to_child_, F_SETFD, FD_CLOEXEC);
  ::fcntl(from_child_, F_SETFD, FD_CLOEXEC);
  ::fcntl(to_child_, F_SETFL, ::fcntl(to_child_, F_GETFL) | O_NONBLOCK);
}

ExternalDetector::~ExternalDetector() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    ::kill(pid_, SIGTERM);
    ::waitpid(pid_, nullptr, 0);
  }
}

void ExternalDetector::WriteAll(const void* data, std::size_t size) {
  const auto* p = static_cast<const char*>(data);
  while (size > 0) {
    pollfd pfd{to_child_, POLLOUT, 0};
    const int ready = ::poll(&pfd, 1, RemainingMs(deadline_));
    if (ready == 0) {
      throw DetectorUnavailable(fmt::format(
          "detector did not accept the request within {} ms", timeout_.count()));
    }
    if (ready < 0 && errno == EINTR) continue;
    const ssize_t n = ::write(to_child_, p, size);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw DetectorClosed(
          fmt::format("detector closed its input: {}", std::strerror(errno)));
    }
    p += n;
    size -= static_cast<std::size_t>(n);
  }
}

std::string ExternalDetector::ReadLine() {
  while (true) {
    if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      return line;
    }
    pollfd pfd{from_child_, POLLIN, 0};
    const int ready = ::poll(&pfd, 1, RemainingMs(deadline_));
    if (ready == 0) {
      throw DetectorUnavailable(
          fmt::format("detector did not answer within {} ms", timeout_.count()));
    }
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw DetectorClosed(fmt::format("poll failed: {}", std::strerror(errno)));
    }
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n == 0) throw DetectorClosed("detector closed its output");
    if (n < 0) {
      if (errno == EINTR) continue;
      throw DetectorClosed(fmt::format("read failed: {}", std::strerror(errno)));
    }
    buffer_.append(chunk, static_cast<std::size_t>(n));
  }
}

std::vector<Detection> ExternalDetector::Detect(const DetectRequest& req) {
  if (to_child_ < 0) throw DetectorClosed("detector connection is closed");
  deadline_ = std::chrono::steady_clock::now() + timeout_;
  try {
    const std::string request =
        fmt::format("DETECT {} {} {}\n", req.frame_index,
                    static_cast<int>(req.region.w), static_cast<int>(req.region.h));
    WriteAll(request.data(), request.size());
    const auto payload = RegionRgb(req.frame, req.region);
    WriteAll(payload.data(), payload.size());

    const std::string header = ReadLine();
    std::istringstream in(header);
    std::string ok;
    long long n = -1;
    if (!(in >> ok >> n) || ok != "OK" || n < 0) {
      throw ProtocolError(fmt::format("bad response header '{}'", header), header);
    }
    std::vector<std::string> records;
    for (long long i = 0; i < n; ++i) records.push_back(ReadLine());
    return ParseDetectorResponse(header, records);
  } catch (const DetectorUnavailable&) {
    // The stream is out of sync after a timeout; refuse further requests.
    ::close(to_child_);
    to_child_ = -1;
    throw;
  }
}

}  // namespace flowtrack
