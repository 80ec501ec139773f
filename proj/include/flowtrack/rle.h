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

// Mask run-length text: "<W>x<H>:<r0>,<r1>,..." with runs alternating
// background / foreground, starting with background, row-major over the
// W x H extent. The extent is anchored at an origin supplied by the caller
// (the owning box's floored top-left corner in the wire formats).

#ifndef FLOWTRACK_RLE_H_
#define FLOWTRACK_RLE_H_

#include <stdexcept>
#include <string>
#include <string_view>

#include "flowtrack/core.h"

namespace flowtrack {

class RleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws RleError on malformed text, a run sum different from W*H, or a
// mask without foreground.
InstanceMask ParseMaskRle(std::string_view text, int origin_x = 0,
                          int origin_y = 0);

// Canonical encoding: only the leading background run may be zero.
std::string EncodeMaskRle(const InstanceMask& mask);

// Text-level canonicalisation of a valid RLE string: drops zero-length runs
// after the first and merges the neighbours they separated.
std::string CanonicalMaskRle(std::string_view text);

}  // namespace flowtrack

#endif  // FLOWTRACK_RLE_H_
