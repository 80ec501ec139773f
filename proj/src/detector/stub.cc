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

#include <thread>

#include "flowtrack/detector.h"

namespace flowtrack {

StubDetector::StubDetector(std::chrono::microseconds delay,
                           std::shared_ptr<Detector> inner)
    : delay_(delay), inner_(std::move(inner)) {}

std::vector<Detection> StubDetector::Detect(const DetectRequest& request) {
  // Sleep most of the delay, spin through the last millisecond.
  const auto until = std::chrono::steady_clock::now() + delay_;
  if (delay_ > std::chrono::milliseconds(2)) {
    std::this_thread::sleep_for(delay_ - std::chrono::milliseconds(1));
  }
  while (std::chrono::steady_clock::now() < until) {
  }
  if (inner_) return inner_->Detect(request);
  return {};
}

}  // namespace flowtrack
