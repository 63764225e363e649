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

#include "iid/imageio.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <vector>

namespace iid {

double srgb_to_linear(double v) {
  if (v <= 0.04045) return v / 12.92;
  return std::pow((v + 0.055) / 1.055, 2.4);
}

double linear_to_srgb(double v) {
  if (v <= 0.0031308) return v * 12.92;
  return 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

namespace {

enum class Format { png, ppm };

Format format_for(const std::string& path) {
  const auto dot = path.rfind('.');
  std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(ch));
  if (ext == ".png") return Format::png;
  if (ext == ".ppm") return Format::ppm;
  throw IoError("unsupported image extension for '" + path +
                "' (expected .png or .ppm)");
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image from_samples(const std::vector<double>& samples, int h, int w, int c,
                   bool assume_srgb) {
  std::vector<double> data(samples);
  if (assume_srgb)
    for (auto& d : data) d = srgb_to_linear(d);
  return Image::from_data(h, w, c, std::move(data));
}

// --- PNG ------------------------------------------------------------------

Image load_png(const std::string& path, bool assume_srgb) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open '" + path + "' for reading");

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw IoError("libpng allocation failed");
  }

  std::vector<png_bytep> rows;
  std::vector<png_byte> storage;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("failed to decode PNG '" + path + "'");
  }

  png_init_io(png, fp.get());
  png_read_info(png, info);

  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  const int color = png_get_color_type(png, info);

  // Normalize to 8/16-bit gray or RGB, no alpha.
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const int depth = png_get_bit_depth(png, info);
  const int nch = png_get_channels(png, info);
  if ((depth != 8 && depth != 16) || (nch != 1 && nch != 3)) {
    png_error(png, "unsupported PNG layout");
  }

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  storage.resize(rowbytes * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = storage.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const double maxval = depth == 8 ? 255.0 : 65535.0;
  std::vector<double> samples(static_cast<std::size_t>(h) * w * nch);
  std::size_t i = 0;
  for (png_uint_32 y = 0; y < h; ++y) {
    const png_byte* row = storage.data() + y * rowbytes;
    for (std::size_t s = 0; s < static_cast<std::size_t>(w) * nch; ++s) {
      if (depth == 8) {
        samples[i++] = row[s] / maxval;
      } else {
        // PNG 16-bit samples are big-endian.
        samples[i++] = ((row[2 * s] << 8) | row[2 * s + 1]) / maxval;
      }
    }
  }
  return from_samples(samples, static_cast<int>(h), static_cast<int>(w), nch,
                      assume_srgb);
}

void save_png(const Image& img, const std::string& path, bool assume_srgb,
              int bit_depth) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot open '" + path + "' for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw IoError("libpng allocation failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng allocation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed to encode PNG '" + path + "'");
  }

  const int h = img.height(), w = img.width(), c = img.channels();
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, w, h, bit_depth,
               c == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  const double maxval = bit_depth == 8 ? 255.0 : 65535.0;
  const std::size_t rowsamples = static_cast<std::size_t>(w) * c;
  std::vector<png_byte> row(rowsamples * (bit_depth / 8));
  for (int y = 0; y < h; ++y) {
    const double* src = img.data() + static_cast<std::size_t>(y) * rowsamples;
    for (std::size_t s = 0; s < rowsamples; ++s) {
      double v = src[s];
      if (assume_srgb) v = linear_to_srgb(v);
      if (v < 0.0) v = 0.0;
      if (v > 1.0) v = 1.0;
      const unsigned q = static_cast<unsigned>(std::lround(v * maxval));
      if (bit_depth == 8) {
        row[s] = static_cast<png_byte>(q);
      } else {
        row[2 * s] = static_cast<png_byte>(q >> 8);
        row[2 * s + 1] = static_cast<png_byte>(q & 0xff);
      }
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// --- PPM (P6 binary) ------------------------------------------------------

// Reads one whitespace/comment-delimited header token.
std::string ppm_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

Image load_ppm(const std::string& path, bool assume_srgb) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  if (ppm_token(in) != "P6") throw IoError("'" + path + "' is not a P6 PPM");
  long w = 0, h = 0, maxval = 0;
  try {
    w = std::stol(ppm_token(in));
    h = std::stol(ppm_token(in));
    maxval = std::stol(ppm_token(in));
  } catch (const std::exception&) {
    throw IoError("malformed PPM header in '" + path + "'");
  }
  if (w < 1 || h < 1 || (maxval != 255 && maxval != 65535))
    throw IoError("unsupported PPM geometry/maxval in '" + path + "'");

  const std::size_t nsamp = static_cast<std::size_t>(w) * h * 3;
  const int bytes = maxval == 255 ? 1 : 2;
  std::vector<unsigned char> raw(nsamp * bytes);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw IoError("truncated PPM payload in '" + path + "'");

  std::vector<double> samples(nsamp);
  for (std::size_t s = 0; s < nsamp; ++s) {
    // 16-bit PPM samples are big-endian, per the netpbm convention.
    const unsigned v = bytes == 1
                           ? raw[s]
                           : (static_cast<unsigned>(raw[2 * s]) << 8) |
                                 raw[2 * s + 1];
    samples[s] = v / static_cast<double>(maxval);
  }
  return from_samples(samples, static_cast<int>(h), static_cast<int>(w), 3,
                      assume_srgb);
}

void save_ppm(const Image& img, const std::string& path, bool assume_srgb,
              int bit_depth) {
  if (img.channels() != 3)
    throw InvalidInput("PPM (P6) requires a 3-channel image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const long maxval = bit_depth == 8 ? 255 : 65535;
  out << "P6\n" << img.width() << " " << img.height() << "\n" << maxval << "\n";
  const double scale = static_cast<double>(maxval);
  for (std::size_t s = 0; s < img.size(); ++s) {
    double v = img.data()[s];
    if (assume_srgb) v = linear_to_srgb(v);
    if (v < 0.0) v = 0.0;
    if (v > 1.0) v = 1.0;
    const unsigned q = static_cast<unsigned>(std::lround(v * scale));
    if (bit_depth == 8) {
      out.put(static_cast<char>(q));
    } else {
      out.put(static_cast<char>(q >> 8));
      out.put(static_cast<char>(q & 0xff));
    }
  }
  if (!out) throw IoError("failed to write PPM '" + path + "'");
}

}  // namespace

Image load_image(const std::string& path, bool assume_srgb) {
  switch (format_for(path)) {
    case Format::png:
      return load_png(path, assume_srgb);
    case Format::ppm:
      return load_ppm(path, assume_srgb);
  }
  throw IoError("unreachable");
}

void save_image(const Image& img, const std::string& path, bool assume_srgb,
                int bit_depth) {
  if (img.empty()) throw InvalidInput("save_image: empty image");
  if (bit_depth != 8 && bit_depth != 16)
    throw InvalidParameter("bit depth must be 8 or 16");
  switch (format_for(path)) {
    case Format::png:
      save_png(img, path, assume_srgb, bit_depth);
      return;
    case Format::ppm:
      save_ppm(img, path, assume_srgb, bit_depth);
      return;
  }
}

}  // namespace iid
