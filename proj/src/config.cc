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

#include "flowtrack/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <variant>

#include <fmt/format.h>

namespace flowtrack {
namespace {

using Field = std::variant<int PipelineConfig::*, double PipelineConfig::*>;

struct KeyDef {
  const char* name;
  Field field;
};

const std::vector<KeyDef>& KeyTable() {
  static const std::vector<KeyDef> table = {
      {"window_size", &PipelineConfig::window_size},
      {"window_overlap_ratio", &PipelineConfig::window_overlap_ratio},
      {"points_per_instance", &PipelineConfig::points_per_instance},
      {"pyramid_levels", &PipelineConfig::pyramid_levels},
      {"windows_per_frame", &PipelineConfig::windows_per_frame},
      {"edge_rate_boost", &PipelineConfig::edge_rate_boost},
      {"instance_rate_boost", &PipelineConfig::instance_rate_boost},
      {"poa_threshold", &PipelineConfig::poa_threshold},
      {"iou_gate", &PipelineConfig::iou_gate},
      {"conf_required_per_detection",
       &PipelineConfig::conf_required_per_detection},
      {"conf_validate_threshold", &PipelineConfig::conf_validate_threshold},
      {"conf_terminate_threshold", &PipelineConfig::conf_terminate_threshold},
      {"lk_window_radius", &PipelineConfig::lk_window_radius},
      {"lk_max_iterations", &PipelineConfig::lk_max_iterations},
      {"lk_epsilon", &PipelineConfig::lk_epsilon},
      {"harris_k", &PipelineConfig::harris_k},
      {"mask_containment_fraction",
       &PipelineConfig::mask_containment_fraction},
  };
  return table;
}

const KeyDef* FindKey(std::string_view key) {
  for (const auto& def : KeyTable()) {
    if (key == def.name) return &def;
  }
  return nullptr;
}

std::string_view Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int ParseInt(std::string_view key, std::string_view v) {
  if (key == "windows_per_frame" && v == "all") {
    return PipelineConfig::kAllWindows;
  }
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw ConfigError(fmt::format("{}: expected integer, got '{}'", key, v));
  }
  return out;
}

double ParseDouble(std::string_view key, std::string_view v) {
  // std::from_chars for double is missing in GCC 11's libstdc++.
  std::string s(v);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(out)) {
    throw ConfigError(fmt::format("{}: expected number, got '{}'", key, v));
  }
  return out;
}

}  // namespace

const std::vector<std::string>& ConfigKeys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& def : KeyTable()) k.emplace_back(def.name);
    return k;
  }();
  return keys;
}

void SetConfigValue(PipelineConfig& cfg, std::string_view key,
                    std::string_view value) {
  const KeyDef* def = FindKey(key);
  if (def == nullptr) {
    throw ConfigError(fmt::format("unknown config key '{}'", key));
  }
  value = Trim(value);
  std::visit(
      [&](auto member) {
        using T = std::remove_reference_t<decltype(cfg.*member)>;
        if constexpr (std::is_same_v<T, int>) {
          cfg.*member = ParseInt(key, value);
        } else {
          cfg.*member = ParseDouble(key, value);
        }
      },
      def->field);
}

std::string GetConfigValue(const PipelineConfig& cfg, std::string_view key) {
  const KeyDef* def = FindKey(key);
  if (def == nullptr) {
    throw ConfigError(fmt::format("unknown config key '{}'", key));
  }
  return std::visit(
      [&](auto member) -> std::string {
        const auto v = cfg.*member;
        if constexpr (std::is_same_v<decltype(v), const int>) {
          if (key == "windows_per_frame" && v == PipelineConfig::kAllWindows) {
            return "all";
          }
        }
        return fmt::format("{}", v);
      },
      def->field);
}

void Validate(const PipelineConfig& c) {
  auto require = [](bool ok, std::string_view what) {
    if (!ok) throw ConfigError(fmt::format("invalid config: {}", what));
  };
  require(c.window_size >= 1, "window_size must be >= 1");
  require(c.window_overlap_ratio >= 0.0 && c.window_overlap_ratio < 1.0,
          "window_overlap_ratio must lie in [0, 1)");
  require(c.points_per_instance >= 1, "points_per_instance must be >= 1");
  require(c.pyramid_levels >= 0, "pyramid_levels must be >= 0");
  require(c.windows_per_frame >= 1, "windows_per_frame must be >= 1");
  require(c.edge_rate_boost >= 1, "edge_rate_boost must be >= 1");
  require(c.instance_rate_boost >= 1, "instance_rate_boost must be >= 1");
  require(c.poa_threshold >= 0.0 && c.poa_threshold <= 1.0,
          "poa_threshold must lie in [0, 1]");
  require(c.iou_gate >= 0.0 && c.iou_gate <= 1.0,
          "iou_gate must lie in [0, 1]");
  require(c.conf_required_per_detection >= 0.0 &&
              c.conf_required_per_detection <= 1.0,
          "conf_required_per_detection must lie in [0, 1]");
  require(c.conf_terminate_threshold < 0.0 && 0.0 < c.conf_validate_threshold,
          "conf_terminate_threshold < 0 < conf_validate_threshold");
  require(c.lk_window_radius >= 1, "lk_window_radius must be >= 1");
  require(c.lk_max_iterations >= 1, "lk_max_iterations must be >= 1");
  require(c.lk_epsilon > 0.0, "lk_epsilon must be > 0");
  require(c.harris_k > 0.0 && c.harris_k < 0.25,
          "harris_k must lie in (0, 0.25)");
  require(c.mask_containment_fraction >= 0.0 &&
              c.mask_containment_fraction <= 1.0,
          "mask_containment_fraction must lie in [0, 1]");
}

PipelineConfig ParseConfig(std::string_view text, const PipelineConfig& base) {
  PipelineConfig cfg = base;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{}
                                        : text.substr(nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(
          fmt::format("line {}: expected 'key = value', got '{}'", line_no,
                      line));
    }
    const auto key = Trim(line.substr(0, eq));
    const auto value = Trim(line.substr(eq + 1));
    try {
      SetConfigValue(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  Validate(cfg);
  return cfg;
}

PipelineConfig LoadConfig(const std::string& path, const PipelineConfig& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path));
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return ParseConfig(ss.str(), base);
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

std::string FormatConfig(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& key : ConfigKeys()) {
    out += fmt::format("{} = {}\n", key, GetConfigValue(cfg, key));
  }
  return out;
}

}  // namespace flowtrack
