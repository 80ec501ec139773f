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

#include <charconv>

#include <fmt/format.h>

#include "flowtrack/detector.h"

namespace flowtrack {

std::shared_ptr<Detector> MakeDetector(const std::string& spec,
                                       std::chrono::milliseconds timeout) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) {
    throw std::invalid_argument(fmt::format(
        "detector '{}': expected oracle:<gt>, exec:<command> or stub:<ms>", spec));
  }
  const std::string kind = spec.substr(0, colon);
  const std::string rest = spec.substr(colon + 1);
  if (rest.empty()) {
    throw std::invalid_argument(fmt::format("detector '{}': missing argument", spec));
  }
  if (kind == "exec") {
    return std::make_shared<ExternalDetector>(rest, timeout);
  }
  if (kind == "oracle") {
    // The noise spec is the trailing field when it holds key=value pairs.
    std::string path = rest;
    OracleNoiseModel noise;
    if (const auto last = rest.rfind(':');
        last != std::string::npos && rest.find('=', last) != std::string::npos) {
      path = rest.substr(0, last);
      noise = ParseNoiseSpec(rest.substr(last + 1));
    }
    auto store = std::make_shared<GroundTruthStore>(LoadGroundTruth(path));
    return std::make_shared<OracleDetector>(std::move(store), noise);
  }
  if (kind == "stub") {
    const auto next = rest.find(':');
    const std::string ms_text = rest.substr(0, next);
    double ms = 0.0;
    const auto [end, ec] =
        std::from_chars(ms_text.data(), ms_text.data() + ms_text.size(), ms);
    if (ec != std::errc() || end != ms_text.data() + ms_text.size() || ms < 0.0) {
      throw std::invalid_argument(
          fmt::format("detector '{}': bad stub delay '{}'", spec, ms_text));
    }
    std::shared_ptr<Detector> inner;
    if (next != std::string::npos) inner = MakeDetector(rest.substr(next + 1), timeout);
    return std::make_shared<StubDetector>(
        std::chrono::microseconds(static_cast<std::int64_t>(ms * 1000.0)),
        std::move(inner));
  }
  throw std::invalid_argument(fmt::format("detector '{}': unknown kind '{}'", spec, kind));
}

}  // namespace flowtrack
