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
#include <string>
#include <vector>

#include "iid/image.hpp"

namespace iid {

// Channel response of a Planckian radiator at temperature T (Kelvin) under
// narrow-band sensors at 610/540/450 nm, using the short-wavelength
// (exponential) approximation of the blackbody curve. Normalized to unit
// channel mean so a 1-channel shading field absorbs all intensity.
// Valid for T in [2500, 12000].
std::array<double, 3> planckian_rgb(double temp_k);

struct ShadowSceneParams {
  std::uint64_t seed = 1;
  int height = 128;
  int width = 128;
  int n_patches = 10;        // distinct reflectances incl. the background
  double lit_temp = 6500.0;  // Kelvin
  double shadow_temp = 3800.0;
  double attenuation = 0.45;  // shading floor inside the shadow, in (0, 1)
  // Gaussian sigma of the shadow edge, pixels. The default is wide on
  // purpose: the entropy sweep needs a continuous illumination mix inside
  // the penumbra, and a hard edge reduces the chromaticity cloud to paired
  // atoms whose accidental alignments can out-collapse the true invariant
  // direction.
  double softness = 10.0;
};

// Two-light Mondrian: random rectangle patches with distinct chromaticities
// at equal luminance, lit by a warm/cool Planckian pair split along a soft
// half-plane shadow. Construction keeps image == reflectance_gt * shading_gt
// with a scalar (1-channel) shading field.
struct ShadowScene {
  Image image;           // 3ch, max value <= 0.98
  Image reflectance_gt;  // 3ch
  Image shading_gt;      // 1ch: 1 - mask * (1 - attenuation)
  Image shadow_mask;     // 1ch in [0,1], 1 = fully shadowed
  std::vector<int> patch_ids;  // H*W labels, 0 = background
  double oracle_theta_deg = 0.0;  // invariant axis implied by the two lights
  ShadowSceneParams params;
};

ShadowScene gen_shadow_scene(const ShadowSceneParams& params);

struct SpecularSceneParams {
  std::uint64_t seed = 1;
  int height = 128;
  int width = 128;
  int n_patches = 8;
  int n_lobes = 3;
  double lobe_strength = 0.25;  // peak amplitude scale of each highlight
  double lobe_sigma = 6.0;      // base radius of each highlight, pixels
};

// Diffuse Mondrian under a smooth shading ramp plus separated achromatic
// Gaussian highlights. image = diffuse + specular exactly; `clipped` reports
// whether any sample exceeded 1 (nothing is clamped in memory).
struct SpecularScene {
  Image image;           // 3ch
  Image diffuse;         // 3ch: reflectance_gt * shading_gt
  Image specular;        // 1ch, applied equally to all channels
  Image reflectance_gt;  // 3ch
  Image shading_gt;      // 1ch ramp in [0.55, 0.95]
  Image lobe_mask;       // 1ch, 1 where specular > 1e-3
  bool clipped = false;
  SpecularSceneParams params;
};

SpecularScene gen_specular_scene(const SpecularSceneParams& params);

// Write a scene as 16-bit PNGs plus metadata.json into an existing
// directory. Returns the file names written (metadata last).
std::vector<std::string> write_shadow_bundle(const ShadowScene& scene,
                                             const std::string& dir);
std::vector<std::string> write_specular_bundle(const SpecularScene& scene,
                                               const std::string& dir);

}  // namespace iid
