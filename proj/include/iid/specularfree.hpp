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

#include <cstdint>
#include <vector>

#include "iid/image.hpp"

namespace iid {

// Target maximum chromaticity of the specular-free transform. 0.5 keeps the
// subtraction non-negative for every input pixel; values in (1/3, 1] are
// accepted and clamping is reported instead.
inline constexpr double kDefaultMaxChroma = 0.5;

// max_c I_c / (I_r + I_g + I_b); black pixels (sum < kEpsBlack) map to 1/3.
double max_chromaticity(double r, double g, double b);

struct SpecularFreeResult {
  Image image;                   // per-channel max(I_c - m, 0)
  std::vector<std::uint8_t> clamped;  // per pixel: any channel hit the floor
  double clamp_fraction = 0.0;   // clamped pixels / total pixels
};

// Per-pixel subtraction m = (max_c I_c - lambda * sum I) / (1 - 3 lambda),
// which forces the output's maximum chromaticity to lambda wherever nothing
// clamps. lambda must lie in (1/3, 1].
SpecularFreeResult specular_free_full(const Image& img,
                                      double lambda = kDefaultMaxChroma);

// Convenience wrapper returning only the image.
Image specular_free(const Image& img, double lambda = kDefaultMaxChroma);

// Luminance (unweighted channel mean) of the specular-free image.
Image specular_free_gray(const Image& img, double lambda = kDefaultMaxChroma);

// The same subtraction exposed as the differentiable target generator used
// by the specular prior loss (identical forward values to specular_free).
Image delta_transform(const Image& img, double lambda = kDefaultMaxChroma);

}  // namespace iid
