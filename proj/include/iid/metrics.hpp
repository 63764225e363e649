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

// One human relative-reflectance judgment: two points in fractional [0, 1]
// coordinates (y, x), which one looks darker ('1', '2', or 'E' for equal),
// and a confidence weight.
struct Judgment {
  double y1 = 0.0, x1 = 0.0;
  double y2 = 0.0, x2 = 0.0;
  char darker = 'E';
  double weight = 1.0;
};

struct JudgmentSet {
  std::vector<Judgment> judgments;
};

enum class LumaMode { mean, rec709 };
enum class SiMode { luminance, per_channel };

// Weighted human disagreement rate: fraction of judgment weight where the
// reflectance ratio at the two points contradicts the label. A ratio beyond
// 1 + delta in either direction predicts the dimmer point as darker;
// otherwise the prediction is 'E'. A zero luminance at either point can
// support no ratio and counts as disagreement. Fractional coordinates map
// to pixels by min(floor(frac * dim), dim - 1).
double whdr(const Image& reflectance, const JudgmentSet& js,
            double delta = 0.10, LumaMode luma = LumaMode::mean);

// Scale-invariant MSE: mean((alpha* pred - gt)^2) with the single scalar
// alpha* = <pred, gt> / <pred, pred> (0 when pred is all zero). Default on
// the luminance plane; per_channel fits one alpha per channel and averages
// the channel MSEs.
double si_mse(const Image& pred, const Image& gt,
              SiMode mode = SiMode::luminance);

// Local variant: si-MSE averaged over half-overlapping square windows of
// side max(round(window_frac * max(H, W)), 2) (clamped per axis), each
// window with its own alpha; the final window on each axis is anchored to
// the image edge so every pixel is covered.
double si_lmse(const Image& pred, const Image& gt, double window_frac = 0.1,
               SiMode mode = SiMode::luminance);

// JSON array of {"p1": [y, x], "p2": [y, x], "darker": "1"|"2"|"E",
// "weight": w} records.
JudgmentSet load_judgments(const std::string& path);

}  // namespace iid
