// Copyright 2026 The iid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <string>

#include "iid/image.hpp"

namespace iid {

// Standard sRGB transfer functions on [0, 1] scalars (linear-segment
// threshold 0.04045 / 0.0031308, exponent 2.4).
double srgb_to_linear(double v);
double linear_to_srgb(double v);

// Load a PNG (8- or 16-bit, gray or RGB; palette expanded, alpha dropped) or
// binary PPM (P6, maxval 255 or 65535), selected by file extension
// (.png / .ppm). Samples are scaled to [0, 1]; with assume_srgb the sRGB
// EOTF is applied so the result is linear. Unknown extensions, truncated or
// malformed files raise IoError.
Image load_image(const std::string& path, bool assume_srgb = false);

// Save to PNG or binary PPM by extension. Values are clamped to [0, 1] and
// quantized to bit_depth (8 or 16; PPM maxval 255 or 65535). With
// assume_srgb the inverse EOTF is applied before quantization. PPM requires
// 3 channels.
void save_image(const Image& img, const std::string& path,
                bool assume_srgb = false, int bit_depth = 16);

}  // namespace iid
