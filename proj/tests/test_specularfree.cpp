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
#include "iid/specularfree.hpp"
#include "support.hpp"

using iid::Image;

TEST_CASE("specularfree: hand-computed pixel") {
  // I = (0.6, 0.3, 0.1), lambda = 0.5:
  // m = (0.6 - 0.5*1.0) / (1 - 1.5) = -0.2, output = I + 0.2.
  const Image img = Image::from_data(1, 1, 3, {0.6, 0.3, 0.1});
  const Image out = iid::specular_free(img, 0.5);
  CHECK(out.at(0, 0, 0) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(out.at(0, 0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(out.at(0, 0, 2) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(iid::max_chromaticity(out.at(0, 0, 0), out.at(0, 0, 1),
                              out.at(0, 0, 2)) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("specularfree: achromatic offsets cancel exactly") {
  const Image base = testsup::random_image(31, 6, 5, 3, 0.05, 0.6);
  Image shifted(6, 5, 3);
  iid::Rng rng(32);
  for (std::size_t p = 0; p < base.pixels(); ++p) {
    const double a = rng.uniform(0.0, 0.3);
    for (int c = 0; c < 3; ++c)
      shifted.data()[3 * p + c] = base.data()[3 * p + c] + a;
  }
  const Image out_base = iid::specular_free(base, 0.5);
  const Image out_shift = iid::specular_free(shifted, 0.5);
  double worst = 0.0;
  for (std::size_t i = 0; i < out_base.size(); ++i)
    worst = std::max(worst,
                     std::abs(out_base.data()[i] - out_shift.data()[i]));
  CHECK(worst < 1e-12);
}

TEST_CASE("specularfree: max chromaticity lands on the target") {
  for (const double lambda : {0.4, 0.5, 0.75}) {
    const Image img = testsup::random_image(33, 8, 8, 3, 0.0, 1.0);
    const iid::SpecularFreeResult res = iid::specular_free_full(img, lambda);
    for (std::size_t p = 0; p < img.pixels(); ++p) {
      if (res.clamped[p]) continue;
      const double r = res.image.data()[3 * p];
      const double g = res.image.data()[3 * p + 1];
      const double b = res.image.data()[3 * p + 2];
      if (r + g + b < iid::kEpsBlack) continue;
      CHECK(iid::max_chromaticity(r, g, b) ==
            doctest::Approx(lambda).epsilon(1e-9));
    }
  }
}

TEST_CASE("specularfree: clamping at aggressive targets is flagged") {
  // Clamping needs lambda > (max - min) / (sum - 3 min); for (0.8, 0.5, 0.1)
  // that bound is 0.7/1.1 = 0.636, so lambda = 0.8 drives blue below zero:
  // m = (0.8 - 0.8 * 1.4) / (1 - 2.4) = 0.22857 > 0.1.
  const Image img = Image::from_data(1, 1, 3, {0.8, 0.5, 0.1});
  const iid::SpecularFreeResult res = iid::specular_free_full(img, 0.8);
  CHECK(res.clamped[0] == 1);
  CHECK(res.clamp_fraction == 1.0);
  CHECK(res.image.at(0, 0, 0) == doctest::Approx(0.8 - 0.32 / 1.4));
  CHECK(res.image.at(0, 0, 1) == doctest::Approx(0.5 - 0.32 / 1.4));
  CHECK(res.image.at(0, 0, 2) == 0.0);
}

TEST_CASE("specularfree: achromatic pixels collapse and count as clamped") {
  const Image img(3, 3, 3, 0.5);
  const iid::SpecularFreeResult res = iid::specular_free_full(img, 0.5);
  CHECK(res.clamp_fraction == 1.0);
  for (std::size_t i = 0; i < res.image.size(); ++i)
    CHECK(res.image.data()[i] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("specularfree: parameter and input validation") {
  const Image img(2, 2, 3, 0.5);
  CHECK_THROWS_AS(iid::specular_free(img, 0.2), iid::InvalidParameter);
  CHECK_THROWS_AS(iid::specular_free(img, 1.0 / 3.0), iid::InvalidParameter);
  CHECK_THROWS_AS(iid::specular_free(img, 1.1), iid::InvalidParameter);
  CHECK_NOTHROW(iid::specular_free(img, 1.0));
  const Image gray(2, 2, 1, 0.5);
  CHECK_THROWS_AS(iid::specular_free(gray, 0.5), iid::InvalidInput);
}

TEST_CASE("specularfree: gray variant is the channel mean") {
  const Image img = Image::from_data(1, 1, 3, {0.6, 0.3, 0.1});
  const Image gray = iid::specular_free_gray(img, 0.5);
  CHECK(gray.channels() == 1);
  CHECK(gray.at(0, 0) ==
        doctest::Approx((0.8 + 0.5 + 0.3) / 3.0).epsilon(1e-12));
}

TEST_CASE("specularfree: black pixels map to black, max_chromaticity guard") {
  CHECK(iid::max_chromaticity(0.0, 0.0, 0.0) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  const Image img = Image::from_data(1, 2, 3, {0, 0, 0, 0.6, 0.3, 0.1});
  const Image out = iid::specular_free(img, 0.5);
  for (int c = 0; c < 3; ++c) CHECK(out.at(0, 0, c) == 0.0);
}
