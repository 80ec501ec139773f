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

#ifndef FLOWTRACK_CONFIG_H_
#define FLOWTRACK_CONFIG_H_

#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace flowtrack {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct PipelineConfig {
  // Written as "all" in config files and on the command line; clamped to the
  // window count at run time.
  static constexpr int kAllWindows = std::numeric_limits<int>::max();

  int window_size = 640;
  double window_overlap_ratio = 0.2;
  int points_per_instance = 5;
  int pyramid_levels = 5;
  int windows_per_frame = 1;
  int edge_rate_boost = 4;
  int instance_rate_boost = 4;
  double poa_threshold = 0.6;
  double iou_gate = 0.1;
  double conf_required_per_detection = 0.3;
  double conf_validate_threshold = 0.9;
  double conf_terminate_threshold = -0.6;
  int lk_window_radius = 10;
  int lk_max_iterations = 30;
  double lk_epsilon = 0.01;
  double harris_k = 0.04;
  double mask_containment_fraction = 0.6;
};

// Every key accepted by ParseConfig / SetConfigValue, in declaration order.
const std::vector<std::string>& ConfigKeys();

// Sets one field from its textual value. Throws ConfigError for unknown keys
// or unparsable values; does not run Validate().
void SetConfigValue(PipelineConfig& cfg, std::string_view key,
                    std::string_view value);
std::string GetConfigValue(const PipelineConfig& cfg, std::string_view key);

// Throws ConfigError naming the first field outside its domain.
void Validate(const PipelineConfig& cfg);

// `key = value` per line, `#` starts a comment, blank lines ignored. Unknown
// keys and malformed lines are errors that carry the line number. Starts from
// `base` so callers can layer files over defaults.
PipelineConfig ParseConfig(std::string_view text,
                           const PipelineConfig& base = {});
PipelineConfig LoadConfig(const std::string& path,
                          const PipelineConfig& base = {});

// Round-trips through ParseConfig.
std::string FormatConfig(const PipelineConfig& cfg);

}  // namespace flowtrack

#endif  // FLOWTRACK_CONFIG_H_
