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

#include "iid/specularfree.hpp"

#include <algorithm>

namespace iid {

double max_chromaticity(double r, double g, double b) {
  const double sum = r + g + b;
  if (sum < kEpsBlack) return 1.0 / 3.0;
  return std::max(r, std::max(g, b)) / sum;
}

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 1.0 / 3.0 && lambda <= 1.0))
    throw InvalidParameter(
        "specular-free target chromaticity must lie in (1/3, 1]");
}

}  // namespace

SpecularFreeResult specular_free_full(const Image& img, double lambda) {
  check_lambda(lambda);
  if (img.channels() != 3)
    throw InvalidInput("specular_free requires a 3-channel image");
  SpecularFreeResult res;
  res.image = Image(img.height(), img.width(), 3);
  res.clamped.assign(img.pixels(), 0);
  const double* in = img.data();
  double* out = res.image.data();
  const double denom = 1.0 - 3.0 * lambda;
  // A channel driven to (or below) zero loses its diffuse profile; treat
  // hitting the floor within rounding noise as clamped too, so achromatic
  // pixels (whose whole output collapses to zero) are flagged.
  constexpr double kFloorTol = 1e-12;
  std::size_t n_clamped = 0;
  for (std::size_t p = 0; p < img.pixels(); ++p) {
    const double r = in[3 * p], g = in[3 * p + 1], b = in[3 * p + 2];
    const double mx = std::max(r, std::max(g, b));
    const double m = (mx - lambda * (r + g + b)) / denom;
    bool clamped = false;
    for (int c = 0; c < 3; ++c) {
      const double v = in[3 * p + c] - m;
      out[3 * p + c] = v < 0.0 ? 0.0 : v;
      if (v < kFloorTol) clamped = true;
    }
    if (clamped) {
      res.clamped[p] = 1;
      ++n_clamped;
    }
  }
  res.clamp_fraction =
      static_cast<double>(n_clamped) / static_cast<double>(img.pixels());
  return res;
}

Image specular_free(const Image& img, double lambda) {
  return specular_free_full(img, lambda).image;
}

Image specular_free_gray(const Image& img, double lambda) {
  return luminance(specular_free(img, lambda));
}

Image delta_transform(const Image& img, double lambda) {
  return specular_free(img, lambda);
}

}  // namespace iid
