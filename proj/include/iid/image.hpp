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

#include <cstddef>
#include <vector>

#include "iid/constants.hpp"
#include "iid/error.hpp"

namespace iid {

// Unconstrained H x W x C grid, row-major, channel-interleaved. Carrier for
// gradients, cotangents and attention maps, all of which may go negative.
struct PixelField {
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<double> v;

  PixelField() = default;
  PixelField(int h, int w, int c, double fill = 0.0);

  std::size_t size() const { return v.size(); }
  std::size_t idx(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * channels + c;
  }
  double& at(int y, int x, int c = 0);
  double at(int y, int x, int c = 0) const;
  bool same_shape(const PixelField& o) const {
    return height == o.height && width == o.width && channels == o.channels;
  }
};

// Image: 1 or 3 channels, every value finite and >= 0. The invariant is
// checked whenever data crosses the boundary into an Image (constructors,
// from_data, loaders); code that fills an image through at()/data() is
// responsible for keeping it.
class Image {
 public:
  Image() = default;
  Image(int height, int width, int channels, double fill = 0.0);
  static Image from_data(int height, int width, int channels,
                         std::vector<double> data);

  int height() const { return h_; }
  int width() const { return w_; }
  int channels() const { return c_; }
  bool empty() const { return v_.empty(); }
  std::size_t size() const { return v_.size(); }
  std::size_t pixels() const {
    return static_cast<std::size_t>(h_) * w_;
  }

  std::size_t idx(int y, int x, int c) const {
    return (static_cast<std::size_t>(y) * w_ + x) * c_ + c;
  }
  double& at(int y, int x, int c = 0);
  double at(int y, int x, int c = 0) const;

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  const std::vector<double>& values() const { return v_; }

  bool same_shape(const Image& o) const {
    return h_ == o.h_ && w_ == o.w_ && c_ == o.c_;
  }

 private:
  int h_ = 0, w_ = 0, c_ = 0;
  std::vector<double> v_;
};

// Forward-difference gradient. dx and dy have the source shape; the last
// column of dx and the last row of dy are exactly zero.
struct GradientField {
  PixelField dx;
  PixelField dy;
};

// Per-pixel c / (r+g+b). Channel sums below kEpsBlack map to the achromatic
// point (1/3, 1/3, 1/3). 3-channel input only.
Image chromaticity(const Image& img);

GradientField gradient(const Image& img);
GradientField gradient(const PixelField& f);

// Transpose of the gradient operator: given cotangents for (dx, dy), returns
// d<cot, gradient(img)>/d img. Entries of cot_dx in the last column and of
// cot_dy in the last row are structurally ignored.
PixelField gradient_adjoint(const PixelField& cot_dx, const PixelField& cot_dy);

// Bilinear downsampling by 2^(level-1) per axis; level 1 is the identity.
// Output dims are ceil(dim / factor); samples are taken at pixel centers
// (src = (dst + 0.5) * in/out - 0.5, clamped) so constant images stay
// constant at every level.
Image downsample(const Image& img, int level);
PixelField downsample(const PixelField& f, int level);

// Transpose of downsample: scatters output-space cotangents back through the
// same bilinear taps. in_height/in_width name the original (fine) shape.
PixelField downsample_adjoint(const PixelField& cot, int in_height,
                              int in_width, int level);

// Unweighted channel mean as a 1-channel image (identity on 1-channel input).
Image luminance(const Image& img);

}  // namespace iid
