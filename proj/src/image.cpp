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

#include "iid/image.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace iid {

namespace {

void check_dims(int h, int w, int c, bool image_channels) {
  if (h < 1 || w < 1) {
    throw InvalidInput("image dimensions must be positive, got " +
                       std::to_string(h) + "x" + std::to_string(w));
  }
  if (image_channels) {
    if (c != 1 && c != 3) {
      throw InvalidInput("image must have 1 or 3 channels, got " +
                         std::to_string(c));
    }
  } else if (c < 1) {
    throw InvalidInput("field channel count must be positive");
  }
}

[[noreturn]] void out_of_range(int y, int x, int c) {
  throw InvalidInput("pixel access out of range at (" + std::to_string(y) +
                     ", " + std::to_string(x) + ", " + std::to_string(c) + ")");
}

}  // namespace

PixelField::PixelField(int h, int w, int c, double fill)
    : height(h), width(w), channels(c) {
  check_dims(h, w, c, /*image_channels=*/false);
  v.assign(static_cast<std::size_t>(h) * w * c, fill);
}

double& PixelField::at(int y, int x, int c) {
  if (y < 0 || y >= height || x < 0 || x >= width || c < 0 || c >= channels)
    out_of_range(y, x, c);
  return v[idx(y, x, c)];
}

double PixelField::at(int y, int x, int c) const {
  if (y < 0 || y >= height || x < 0 || x >= width || c < 0 || c >= channels)
    out_of_range(y, x, c);
  return v[idx(y, x, c)];
}

Image::Image(int height, int width, int channels, double fill)
    : h_(height), w_(width), c_(channels) {
  check_dims(height, width, channels, /*image_channels=*/true);
  if (!std::isfinite(fill) || fill < 0.0)
    throw InvalidInput("image fill value must be finite and non-negative");
  v_.assign(static_cast<std::size_t>(h_) * w_ * c_, fill);
}

Image Image::from_data(int height, int width, int channels,
                       std::vector<double> data) {
  check_dims(height, width, channels, /*image_channels=*/true);
  const std::size_t expect =
      static_cast<std::size_t>(height) * width * channels;
  if (data.size() != expect) {
    throw InvalidInput("image data size " + std::to_string(data.size()) +
                       " does not match shape (expected " +
                       std::to_string(expect) + ")");
  }
  for (double d : data) {
    if (!std::isfinite(d) || d < 0.0)
      throw InvalidInput("image values must be finite and non-negative");
  }
  Image img;
  img.h_ = height;
  img.w_ = width;
  img.c_ = channels;
  img.v_ = std::move(data);
  return img;
}

double& Image::at(int y, int x, int c) {
  if (y < 0 || y >= h_ || x < 0 || x >= w_ || c < 0 || c >= c_)
    out_of_range(y, x, c);
  return v_[idx(y, x, c)];
}

double Image::at(int y, int x, int c) const {
  if (y < 0 || y >= h_ || x < 0 || x >= w_ || c < 0 || c >= c_)
    out_of_range(y, x, c);
  return v_[idx(y, x, c)];
}

Image chromaticity(const Image& img) {
  if (img.channels() != 3)
    throw InvalidInput("chromaticity requires a 3-channel image");
  Image out(img.height(), img.width(), 3);
  const double* in = img.data();
  double* o = out.data();
  const std::size_t n = img.pixels();
  for (std::size_t p = 0; p < n; ++p) {
    const double r = in[3 * p], g = in[3 * p + 1], b = in[3 * p + 2];
    const double sum = r + g + b;
    if (sum < kEpsBlack) {
      o[3 * p] = o[3 * p + 1] = o[3 * p + 2] = 1.0 / 3.0;
    } else {
      o[3 * p] = r / sum;
      o[3 * p + 1] = g / sum;
      o[3 * p + 2] = b / sum;
    }
  }
  return out;
}

namespace {

template <typename Src>
GradientField gradient_impl(const Src& f, int h, int w, int c) {
  GradientField g;
  g.dx = PixelField(h, w, c);
  g.dy = PixelField(h, w, c);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < c; ++k) {
        const std::size_t i = (static_cast<std::size_t>(y) * w + x) * c + k;
        if (x + 1 < w) g.dx.v[i] = f[i + c] - f[i];
        if (y + 1 < h)
          g.dy.v[i] = f[i + static_cast<std::size_t>(w) * c] - f[i];
      }
    }
  }
  return g;
}

}  // namespace

GradientField gradient(const Image& img) {
  return gradient_impl(img.data(), img.height(), img.width(), img.channels());
}

GradientField gradient(const PixelField& f) {
  return gradient_impl(f.v.data(), f.height, f.width, f.channels);
}

PixelField gradient_adjoint(const PixelField& cot_dx,
                            const PixelField& cot_dy) {
  if (!cot_dx.same_shape(cot_dy))
    throw InvalidInput("gradient_adjoint: cotangent shapes differ");
  const int h = cot_dx.height, w = cot_dx.width, c = cot_dx.channels;
  PixelField out(h, w, c);
  // d(dx[y][x]) / d f = -1 at (y,x), +1 at (y,x+1); transpose accordingly.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < c; ++k) {
        const std::size_t i = out.idx(y, x, k);
        double acc = 0.0;
        if (x + 1 < w) acc -= cot_dx.v[i];
        if (x >= 1) acc += cot_dx.v[i - c];
        if (y + 1 < h) acc -= cot_dy.v[i];
        if (y >= 1) acc += cot_dy.v[i - static_cast<std::size_t>(w) * c];
        out.v[i] = acc;
      }
    }
  }
  return out;
}

namespace {

struct Tap {
  int i0, i1;
  double w0, w1;
};

// One bilinear tap per output coordinate along one axis.
std::vector<Tap> make_taps(int in, int out) {
  std::vector<Tap> taps(out);
  const double scale = static_cast<double>(in) / out;
  for (int d = 0; d < out; ++d) {
    double src = (d + 0.5) * scale - 0.5;
    if (src < 0.0) src = 0.0;
    if (src > in - 1) src = in - 1;
    const int i0 = static_cast<int>(src);
    const int i1 = (i0 + 1 < in) ? i0 + 1 : i0;
    const double f = src - i0;
    taps[d] = {i0, i1, 1.0 - f, f};
  }
  return taps;
}

int out_dim(int in, int factor) { return (in + factor - 1) / factor; }

int check_level(int level) {
  if (level < 1 || level > 3)
    throw InvalidParameter("downsample level must be 1, 2, or 3");
  return 1 << (level - 1);
}

PixelField downsample_field(const double* in, int h, int w, int c, int level) {
  const int factor = check_level(level);
  const int oh = out_dim(h, factor), ow = out_dim(w, factor);
  const auto ty = make_taps(h, oh);
  const auto tx = make_taps(w, ow);
  PixelField out(oh, ow, c);
  for (int y = 0; y < oh; ++y) {
    const Tap& ry = ty[y];
    for (int x = 0; x < ow; ++x) {
      const Tap& rx = tx[x];
      for (int k = 0; k < c; ++k) {
        const auto pick = [&](int yy, int xx) {
          return in[(static_cast<std::size_t>(yy) * w + xx) * c + k];
        };
        out.v[out.idx(y, x, k)] =
            ry.w0 * (rx.w0 * pick(ry.i0, rx.i0) + rx.w1 * pick(ry.i0, rx.i1)) +
            ry.w1 * (rx.w0 * pick(ry.i1, rx.i0) + rx.w1 * pick(ry.i1, rx.i1));
      }
    }
  }
  return out;
}

}  // namespace

Image downsample(const Image& img, int level) {
  if (img.empty()) throw InvalidInput("downsample: empty image");
  PixelField f = downsample_field(img.data(), img.height(), img.width(),
                                  img.channels(), level);
  // Convex combinations of non-negative values; reuse storage directly.
  Image out(f.height, f.width, f.channels);
  double* o = out.data();
  for (std::size_t i = 0; i < f.size(); ++i) o[i] = f.v[i] < 0.0 ? 0.0 : f.v[i];
  return out;
}

PixelField downsample(const PixelField& f, int level) {
  if (f.v.empty()) throw InvalidInput("downsample: empty field");
  return downsample_field(f.v.data(), f.height, f.width, f.channels, level);
}

PixelField downsample_adjoint(const PixelField& cot, int in_height,
                              int in_width, int level) {
  const int factor = check_level(level);
  if (in_height < 1 || in_width < 1)
    throw InvalidInput("downsample_adjoint: bad input shape");
  const int oh = out_dim(in_height, factor), ow = out_dim(in_width, factor);
  if (cot.height != oh || cot.width != ow)
    throw InvalidInput("downsample_adjoint: cotangent shape mismatch");
  const auto ty = make_taps(in_height, oh);
  const auto tx = make_taps(in_width, ow);
  PixelField out(in_height, in_width, cot.channels);
  const int c = cot.channels;
  for (int y = 0; y < oh; ++y) {
    const Tap& ry = ty[y];
    for (int x = 0; x < ow; ++x) {
      const Tap& rx = tx[x];
      for (int k = 0; k < c; ++k) {
        const double g = cot.v[cot.idx(y, x, k)];
        const auto put = [&](int yy, int xx, double wgt) {
          out.v[(static_cast<std::size_t>(yy) * in_width + xx) * c + k] +=
              wgt * g;
        };
        put(ry.i0, rx.i0, ry.w0 * rx.w0);
        put(ry.i0, rx.i1, ry.w0 * rx.w1);
        put(ry.i1, rx.i0, ry.w1 * rx.w0);
        put(ry.i1, rx.i1, ry.w1 * rx.w1);
      }
    }
  }
  return out;
}

Image luminance(const Image& img) {
  if (img.empty()) throw InvalidInput("luminance: empty image");
  if (img.channels() == 1) return img;
  Image out(img.height(), img.width(), 1);
  const double* in = img.data();
  double* o = out.data();
  const std::size_t n = img.pixels();
  for (std::size_t p = 0; p < n; ++p)
    o[p] = (in[3 * p] + in[3 * p + 1] + in[3 * p + 2]) / 3.0;
  return out;
}

}  // namespace iid
