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

#ifndef FLOWTRACK_IMAGE_IO_H_
#define FLOWTRACK_IMAGE_IO_H_

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "flowtrack/core.h"

namespace flowtrack {

// File-system failure; what() names the offending path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary PPM (P6, maxval 255) for RGB and PGM (P5) for luma.
void WritePnm(const std::filesystem::path& path, const ImageBuffer& img);
ImageBuffer ReadPnm(const std::filesystem::path& path);

// Sorted *.ppm / *.pgm files of a frame directory.
std::vector<std::filesystem::path> ListFrames(const std::filesystem::path& dir);

std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, const std::string& text);

}  // namespace flowtrack

#endif  // FLOWTRACK_IMAGE_IO_H_
