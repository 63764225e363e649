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
#include <limits>

#include "doctest.h"
#include "iid/constants.hpp"
#include "iid/error.hpp"
#include "iid/image.hpp"
#include "support.hpp"

using iid::GradientField;
using iid::Image;
using iid::PixelField;

TEST_CASE("image: construction and indexing") {
  Image img(2, 3, 3, 0.25);
  CHECK(img.height() == 2);
  CHECK(img.width() == 3);
  CHECK(img.channels() == 3);
  CHECK(img.size() == 18);
  CHECK(img.pixels() == 6);
  img.at(1, 2, 2) = 0.75;
  CHECK(img.at(1, 2, 2) == 0.75);
  CHECK(img.at(0, 0, 0) == 0.25);
  CHECK_FALSE(img.empty());
  CHECK(Image().empty());
}

TEST_CASE("image: from_data validates") {
  CHECK_THROWS_AS(Image::from_data(1, 1, 3, {0.1, 0.2}), iid::InvalidInput);
  CHECK_THROWS_AS(Image::from_data(1, 1, 3, {0.1, -0.2, 0.3}),
                  iid::InvalidInput);
  CHECK_THROWS_AS(
      Image::from_data(1, 1, 3,
                       {0.1, std::numeric_limits<double>::quiet_NaN(), 0.3}),
      iid::InvalidInput);
  CHECK_THROWS_AS(Image::from_data(1, 1, 2, {0.1, 0.2}), iid::InvalidInput);
  CHECK_THROWS_AS(Image::from_data(0, 1, 1, {}), iid::InvalidInput);
  const Image ok = Image::from_data(1, 2, 1, {0.0, 2.5});
  CHECK(ok.at(0, 1) == 2.5);
}

TEST_CASE("image: chromaticity normalizes and guards black") {
  const Image img = Image::from_data(1, 2, 3, {0.2, 0.3, 0.5, 0.0, 0.0, 0.0});
  const Image c = iid::chromaticity(img);
  CHECK(c.at(0, 0, 0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(c.at(0, 0, 1) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(c.at(0, 0, 2) == doctest::Approx(0.5).epsilon(1e-12));
  for (int ch = 0; ch < 3; ++ch)
    CHECK(c.at(0, 1, ch) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("gradient: forward differences with zero borders") {
  // 2x3 single channel: rows (1, 2, 4) and (0, 5, 1).
  const Image img = Image::from_data(2, 3, 1, {1, 2, 4, 0, 5, 1});
  const GradientField g = iid::gradient(img);
  CHECK(g.dx.at(0, 0, 0) == 1.0);
  CHECK(g.dx.at(0, 1, 0) == 2.0);
  CHECK(g.dx.at(0, 2, 0) == 0.0);  // structural zero on the last column
  CHECK(g.dx.at(1, 0, 0) == 5.0);
  CHECK(g.dy.at(0, 0, 0) == -1.0);
  CHECK(g.dy.at(0, 1, 0) == 3.0);
  CHECK(g.dy.at(1, 0, 0) == 0.0);  // structural zero on the last row
  CHECK(g.dy.at(1, 2, 0) == 0.0);
}

TEST_CASE("gradient adjoint: inner-product identity") {
  // <grad(x), (cx, cy)> == <x, grad_adjoint(cx, cy)> for random fields.
  const Image x = testsup::random_image(101, 5, 7, 3, 0.0, 1.0);
  PixelField cx(5, 7, 3), cy(5, 7, 3);
  iid::Rng rng(102);
  for (std::size_t i = 0; i < cx.v.size(); ++i) {
    cx.v[i] = rng.uniform(-1.0, 1.0);
    cy.v[i] = rng.uniform(-1.0, 1.0);
  }
  const GradientField g = iid::gradient(x);
  double lhs = 0.0;
  for (std::size_t i = 0; i < g.dx.v.size(); ++i)
    lhs += g.dx.v[i] * cx.v[i] + g.dy.v[i] * cy.v[i];
  const PixelField adj = iid::gradient_adjoint(cx, cy);
  double rhs = 0.0;
  for (std::size_t i = 0; i < adj.v.size(); ++i)
    rhs += adj.v[i] * x.data()[i];
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
}

TEST_CASE("downsample: sizes, identity level, constant preservation") {
  const Image img = testsup::random_image(7, 9, 5, 3, 0.0, 1.0);
  const Image l1 = iid::downsample(img, 1);
  CHECK(l1.height() == 9);
  CHECK(l1.width() == 5);
  for (std::size_t i = 0; i < img.size(); ++i)
    CHECK(l1.data()[i] == img.data()[i]);

  const Image l2 = iid::downsample(img, 2);
  CHECK(l2.height() == 5);  // ceil(9/2)
  CHECK(l2.width() == 3);   // ceil(5/2)
  const Image l3 = iid::downsample(img, 3);
  CHECK(l3.height() == 3);  // ceil(9/4)
  CHECK(l3.width() == 2);   // ceil(5/4)

  const Image flat(6, 6, 1, 0.37);
  const Image fl = iid::downsample(flat, 2);
  for (std::size_t i = 0; i < fl.size(); ++i)
    CHECK(fl.data()[i] == doctest::Approx(0.37).epsilon(1e-14));

  CHECK_THROWS_AS(iid::downsample(img, 0), iid::InvalidParameter);
  CHECK_THROWS_AS(iid::downsample(img, 4), iid::InvalidParameter);
}

TEST_CASE("downsample adjoint: inner-product identity") {
  const Image x = testsup::random_image(201, 7, 6, 1, 0.0, 1.0);
  for (int level = 2; level <= 3; ++level) {
    const Image down = iid::downsample(x, level);
    PixelField cot(down.height(), down.width(), 1);
    iid::Rng rng(300 + level);
    for (auto& v : cot.v) v = rng.uniform(-1.0, 1.0);
    double lhs = 0.0;
    for (std::size_t i = 0; i < cot.v.size(); ++i)
      lhs += cot.v[i] * down.data()[i];
    const PixelField adj = iid::downsample_adjoint(cot, 7, 6, level);
    double rhs = 0.0;
    for (std::size_t i = 0; i < adj.v.size(); ++i)
      rhs += adj.v[i] * x.data()[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("luminance: unweighted channel mean") {
  const Image img = Image::from_data(1, 1, 3, {0.3, 0.6, 0.9});
  const Image y = iid::luminance(img);
  CHECK(y.channels() == 1);
  CHECK(y.at(0, 0) == doctest::Approx(0.6).epsilon(1e-14));
  // A single-channel image passes through.
  const Image g = Image::from_data(1, 1, 1, {0.4});
  CHECK(iid::luminance(g).at(0, 0) == 0.4);
}
