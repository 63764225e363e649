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

#include <cmath>

#include "doctest.h"
#include "iid/error.hpp"
#include "iid/imageio.hpp"
#include "support.hpp"

using iid::Image;

namespace {

// Values already on the quantization grid survive a save/load unchanged.
Image quantized_random(std::uint64_t seed, int h, int w, int c, int levels) {
  Image img = testsup::random_image(seed, h, w, c, 0.0, 1.0);
  for (std::size_t i = 0; i < img.size(); ++i)
    img.data()[i] = std::round(img.data()[i] * levels) / levels;
  return img;
}

void check_equal(const Image& a, const Image& b, double tol = 0.0) {
  REQUIRE(a.same_shape(b));
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  CHECK(worst <= tol);
}

}  // namespace

TEST_CASE("imageio: 16-bit PNG roundtrip is exact on the grid") {
  testsup::TempDir dir("png16");
  const Image img = quantized_random(21, 5, 4, 3, 65535);
  iid::save_image(img, dir.file("a.png"));
  check_equal(iid::load_image(dir.file("a.png")), img);
}

TEST_CASE("imageio: 8-bit PNG roundtrip is exact on the grid") {
  testsup::TempDir dir("png8");
  const Image img = quantized_random(22, 4, 6, 3, 255);
  iid::save_image(img, dir.file("a.png"), false, 8);
  check_equal(iid::load_image(dir.file("a.png")), img);
}

TEST_CASE("imageio: single-channel PNG roundtrip") {
  testsup::TempDir dir("pnggray");
  const Image img = quantized_random(23, 7, 3, 1, 65535);
  iid::save_image(img, dir.file("g.png"));
  const Image back = iid::load_image(dir.file("g.png"));
  CHECK(back.channels() == 1);
  check_equal(back, img);
}

TEST_CASE("imageio: PPM roundtrip and channel requirement") {
  testsup::TempDir dir("ppm");
  const Image img = quantized_random(24, 3, 5, 3, 65535);
  iid::save_image(img, dir.file("a.ppm"));
  check_equal(iid::load_image(dir.file("a.ppm")), img);
  const Image gray(2, 2, 1, 0.5);
  CHECK_THROWS_AS(iid::save_image(gray, dir.file("g.ppm")),
                  iid::InvalidInput);
}

TEST_CASE("imageio: out-of-range values clamp on save") {
  testsup::TempDir dir("clamp");
  Image img(1, 2, 3, 0.5);
  img.at(0, 0, 0) = 1.5;
  iid::save_image(img, dir.file("c.png"));
  const Image back = iid::load_image(dir.file("c.png"));
  CHECK(back.at(0, 0, 0) == 1.0);
  CHECK(back.at(0, 1, 1) == doctest::Approx(0.5).epsilon(1e-4));
}

TEST_CASE("imageio: sRGB transfer pair") {
  CHECK(iid::srgb_to_linear(0.0) == 0.0);
  CHECK(iid::srgb_to_linear(1.0) == doctest::Approx(1.0).epsilon(1e-12));
  // Below the toe threshold the curve is linear with slope 1/12.92.
  CHECK(iid::srgb_to_linear(0.04045) ==
        doctest::Approx(0.04045 / 12.92).epsilon(1e-12));
  for (double x = 0.0; x <= 1.0; x += 0.001) {
    CHECK(iid::linear_to_srgb(iid::srgb_to_linear(x)) ==
          doctest::Approx(x).epsilon(1e-9));
    CHECK(iid::srgb_to_linear(iid::linear_to_srgb(x)) ==
          doctest::Approx(x).epsilon(1e-9));
  }
}

TEST_CASE("imageio: sRGB-encoded roundtrip stays close in linear space") {
  testsup::TempDir dir("srgbio");
  const Image img = testsup::random_image(25, 6, 6, 3, 0.0, 1.0);
  iid::save_image(img, dir.file("s.png"), /*assume_srgb=*/true);
  const Image back = iid::load_image(dir.file("s.png"), /*assume_srgb=*/true);
  // 16-bit quantization in the encoded domain; tiny error after decoding.
  check_equal(back, img, 2e-4);
}

TEST_CASE("imageio: errors") {
  testsup::TempDir dir("ioerr");
  CHECK_THROWS_AS(iid::load_image(dir.file("missing.png")), iid::IoError);
  const Image img(2, 2, 3, 0.5);
  CHECK_THROWS_AS(iid::save_image(img, dir.file("a.bmp")), iid::IoError);
  CHECK_THROWS_AS(iid::save_image(img, dir.file("a.png"), false, 12),
                  iid::InvalidParameter);
  CHECK_THROWS_AS(iid::save_image(Image(), dir.file("e.png")),
                  iid::InvalidInput);
}
