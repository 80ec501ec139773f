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

#include "flowtrack/rle.h"

#include <charconv>
#include <vector>

#include <fmt/format.h>

namespace flowtrack {
namespace {

struct RleParts {
  int width = 0;
  int height = 0;
  std::vector<long long> runs;
};

long long ParseNumber(std::string_view s, std::string_view whole) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || v < 0) {
    throw RleError(fmt::format("bad number '{}' in mask rle '{}'", s, whole));
  }
  return v;
}

RleParts Split(std::string_view text) {
  const auto colon = text.find(':');
  const auto x = text.find('x');
  if (colon == std::string_view::npos || x == std::string_view::npos ||
      x > colon) {
    throw RleError(fmt::format("mask rle '{}' lacks '<W>x<H>:' header", text));
  }
  RleParts parts;
  const long long w = ParseNumber(text.substr(0, x), text);
  const long long h = ParseNumber(text.substr(x + 1, colon - x - 1), text);
  if (w < 1 || h < 1 || w > (1 << 20) || h > (1 << 20)) {
    throw RleError(fmt::format("mask rle '{}' has invalid extent", text));
  }
  parts.width = static_cast<int>(w);
  parts.height = static_cast<int>(h);
  std::string_view body = text.substr(colon + 1);
  while (true) {
    const auto comma = body.find(',');
    parts.runs.push_back(ParseNumber(body.substr(0, comma), text));
    if (comma == std::string_view::npos) break;
    body = body.substr(comma + 1);
  }
  long long total = 0;
  for (long long r : parts.runs) total += r;
  if (total != w * h) {
    throw RleError(fmt::format("mask rle '{}': run sum {} != {}", text, total,
                               w * h));
  }
  return parts;
}

std::vector<long long> Canonicalise(const std::vector<long long>& runs) {
  // Runs carry colour by parity of their index.
  std::vector<long long> out;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const bool fg = i % 2 == 1;
    const bool out_fg = out.size() % 2 == 1;
    if (runs[i] == 0) continue;
    if (out.empty() && fg) {
      out.push_back(0);
      out.push_back(runs[i]);
    } else if (!out.empty() && out_fg != fg) {
      out.back() += runs[i];  // same colour as the last emitted run
    } else {
      out.push_back(runs[i]);
    }
  }
  if (out.empty()) out.push_back(0);
  return out;
}

std::string Format(int w, int h, const std::vector<long long>& runs) {
  std::string s = fmt::format("{}x{}:", w, h);
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i) s += ',';
    s += fmt::format("{}", runs[i]);
  }
  return s;
}

}  // namespace

InstanceMask ParseMaskRle(std::string_view text, int origin_x, int origin_y) {
  const RleParts parts = Split(text);
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(parts.width) *
                                 parts.height);
  std::size_t pos = 0;
  bool any = false;
  for (std::size_t i = 0; i < parts.runs.size(); ++i) {
    const std::uint8_t v = i % 2 == 1;
    for (long long k = 0; k < parts.runs[i]; ++k) bits[pos++] = v;
    any = any || (v && parts.runs[i] > 0);
  }
  if (!any) {
    throw RleError(fmt::format("mask rle '{}' has no foreground", text));
  }
  return InstanceMask(origin_x, origin_y, parts.width, parts.height,
                      std::move(bits));
}

std::string EncodeMaskRle(const InstanceMask& mask) {
  std::vector<long long> runs;
  std::uint8_t cur = 0;
  long long len = 0;
  for (std::uint8_t b : mask.bits()) {
    if (b != cur) {
      runs.push_back(len);
      cur = b;
      len = 0;
    }
    ++len;
  }
  runs.push_back(len);
  return Format(mask.width(), mask.height(), runs);
}

std::string CanonicalMaskRle(std::string_view text) {
  const RleParts parts = Split(text);
  return Format(parts.width, parts.height, Canonicalise(parts.runs));
}

}  // namespace flowtrack
