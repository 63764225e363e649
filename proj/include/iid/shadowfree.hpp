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

#include <array>
#include <cstdint>
#include <vector>

#include "iid/image.hpp"

namespace iid {

// Orthonormal basis of the plane orthogonal to (1,1,1)/sqrt(3) in log-RGB.
// Log-chromaticity coordinates are the projections onto these two axes.
inline constexpr std::array<double, 3> kLogChromaU1 = {
    0.7071067811865476, -0.7071067811865476, 0.0};
inline constexpr std::array<double, 3> kLogChromaU2 = {
    0.4082482904638630, 0.4082482904638630, -0.8164965809277260};

struct LogChromaticity {
  int height = 0;
  int width = 0;
  std::vector<double> u;            // first plane coordinate, row-major
  std::vector<double> v;            // second plane coordinate
  std::vector<std::uint8_t> valid;  // 1 where all channels > kEpsBlack
  int valid_count = 0;
};

// Entropy of the 1-D projection of the valid log-chromaticity points, for
// every integer angle 0..179 degrees.
struct EntropyProfile {
  std::array<double, 180> entropy_bits{};
};

// Project each pixel's log-RGB onto the chromaticity plane. Pixels with any
// channel <= kEpsBlack are masked invalid (coordinates 0). Throws
// DegenerateInput when fewer than 2 pixels survive.
LogChromaticity log_chromaticity(const Image& img);

// For each angle: project valid points onto (cos t, sin t), keep the 5th-95th
// percentile span, bin with Scott's-rule width (3.5 sigma n^(-1/3), at most
// 256 bins), and take the Shannon entropy in bits of the bin histogram.
EntropyProfile entropy_profile(const LogChromaticity& lc);

// Angle (degrees, 0..179) minimizing the profile; ties break to the smallest
// angle so the sweep is deterministic.
int min_entropy_angle(const EntropyProfile& profile);

// exp of the projection onto the invariant axis (theta in degrees). Invalid
// pixels are 0. This is the un-rescaled invariant; per-region statistics are
// meaningful on it because values stay bounded away from zero.
Image invariant_grayscale_raw(const LogChromaticity& lc, double theta_deg);

// The same image affinely rescaled so the 2nd-98th percentile of the valid
// pixels maps to [0, 1] (clamped); a degenerate percentile span yields a
// constant 0.5. Intended for files and display.
Image invariant_grayscale(const LogChromaticity& lc, double theta_deg);

// Full-color shadow-free chromaticity: keep each pixel's coordinate along
// the invariant axis, replace the orthogonal coordinate with the median
// orthogonal coordinate of the brightest 1% of valid pixels (by channel
// sum), lift back to log-RGB, exponentiate, and L1-normalize per pixel.
// Invalid pixels map to (1/3, 1/3, 1/3).
Image colored_shadowfree(const Image& img, double theta_deg);

}  // namespace iid
