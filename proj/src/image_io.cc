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

#include "flowtrack/image_io.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace flowtrack {
namespace fs = std::filesystem;
namespace {

// Next whitespace-separated header token, skipping '#' comments.
std::string HeaderToken(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

}  // namespace

void WritePnm(const fs::path& path, const ImageBuffer& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write image '{}'", path.string()));
  out << (img.channels() == 3 ? "P6" : "P5") << '\n'
      << img.width() << ' ' << img.height() << "\n255\n";
  const auto data = img.data();
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError(fmt::format("short write to '{}'", path.string()));
}

ImageBuffer ReadPnm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open image '{}'", path.string()));
  const std::string magic = HeaderToken(in);
  if (magic != "P6" && magic != "P5") {
    throw IoError(fmt::format("'{}' is not a binary PPM/PGM", path.string()));
  }
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(HeaderToken(in));
    h = std::stoi(HeaderToken(in));
    maxval = std::stoi(HeaderToken(in));
  } catch (const std::exception&) {
    throw IoError(fmt::format("bad PNM header in '{}'", path.string()));
  }
  if (w < 1 || h < 1 || maxval != 255) {
    throw IoError(fmt::format("unsupported PNM header in '{}'", path.string()));
  }
  const int channels = magic == "P6" ? 3 : 1;
  std::vector<std::uint8_t> data(static_cast<std::size_t>(w) * h * channels);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size()));
  if (in.gcount() != static_cast<std::streamsize>(data.size())) {
    throw IoError(fmt::format("truncated pixel data in '{}'", path.string()));
  }
  return ImageBuffer(w, h, channels, std::move(data));
}

std::vector<fs::path> ListFrames(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError(fmt::format("frame directory '{}' not found", dir.string()));
  }
  std::vector<fs::path> frames;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".ppm" || ext == ".pgm")) {
      frames.push_back(entry.path());
    }
  }
  std::sort(frames.begin(), frames.end());
  return frames;
}

std::string ReadTextFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("short write to '{}'", path.string()));
}

}  // namespace flowtrack
