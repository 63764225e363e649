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
#include <vector>

#include "iid/image.hpp"

namespace iid {

// m real-valued feature maps of one spatial size, map-major.
struct FeatureStack {
  int count = 0;
  int height = 0;
  int width = 0;
  std::vector<double> v;

  FeatureStack() = default;
  FeatureStack(int m, int h, int w, double fill = 0.0);

  std::size_t size() const { return v.size(); }
  std::size_t idx(int i, int y, int x) const {
    return (static_cast<std::size_t>(i) * height + y) * width + x;
  }
  double& at(int i, int y, int x);
  double at(int i, int y, int x) const;
};

struct ClassifierWeights {
  std::vector<double> w;  // one weight per feature map
};

// Classifier-weighted mean of the maps: (1/m) sum w_i F_i. The raw map is
// the contractual output and may be negative, hence a field rather than an
// Image.
PixelField cam_attention(const FeatureStack& f, const ClassifierWeights& cw);

// Min-max rescale of the raw attention to [0, 1] for visualization; a
// constant map becomes 0.5.
Image cam_attention_heat(const FeatureStack& f, const ClassifierWeights& cw);

// Per-map standardization: (x - mean_i) / sqrt(var_i + kEpsNorm), population
// variance over one map's pixels.
FeatureStack instance_norm(const FeatureStack& f);

// Standardization over all maps jointly.
FeatureStack layer_norm(const FeatureStack& f);

// Learnable blend of the two: gamma_i * ((1-nu) * IN + nu * LN) + beta_i,
// with per-map affine parameters and nu in [0, 1]. nu=0 with unit affine
// reproduces instance_norm exactly; nu=1 reproduces layer_norm.
FeatureStack lin_norm(const FeatureStack& f, const std::vector<double>& gamma,
                      const std::vector<double>& beta, double nu);

// Container format: magic "FSTK", uint32-LE header length, JSON header
// {m, height, width, dtype:"f32", layout:"map-major", endian:"little"},
// then m*h*w little-endian float32 samples.
FeatureStack load_feature_stack(const std::string& path);
void save_feature_stack(const FeatureStack& f, const std::string& path);

// JSON file {"weights": [...]}.
ClassifierWeights load_classifier_weights(const std::string& path);

// Map a scalar field through a dark-to-warm colormap (min-max normalized)
// for PNG export.
Image render_heatmap(const PixelField& map);

}  // namespace iid
