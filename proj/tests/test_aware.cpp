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
#include <fstream>

#include "doctest.h"
#include "iid/aware.hpp"
#include "iid/error.hpp"
#include "iid/rng.hpp"
#include "support.hpp"

using iid::ClassifierWeights;
using iid::FeatureStack;

namespace {

FeatureStack random_stack(std::uint64_t seed, int m, int h, int w,
                          double lo = -1.0, double hi = 1.0) {
  iid::Rng rng(seed);
  FeatureStack f(m, h, w);
  for (auto& v : f.v) v = rng.uniform(lo, hi);
  return f;
}

}  // namespace

TEST_CASE("cam: weighted mean of maps, hand fixture") {
  FeatureStack f(2, 1, 2);
  f.at(0, 0, 0) = 1.0;
  f.at(0, 0, 1) = 3.0;
  f.at(1, 0, 0) = -2.0;
  f.at(1, 0, 1) = 4.0;
  const iid::PixelField a = iid::cam_attention(f, {{2.0, -1.0}});
  // (1/2) * (2*F0 - F1).
  CHECK(a.at(0, 0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(a.at(0, 1, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("cam: linear in the classifier weights") {
  const FeatureStack f = random_stack(81, 4, 6, 5);
  iid::Rng rng(82);
  std::vector<double> w1(4), w2(4), mix(4);
  const double alpha = 0.7, beta = -1.3;
  for (int i = 0; i < 4; ++i) {
    w1[i] = rng.uniform(-1.0, 1.0);
    w2[i] = rng.uniform(-1.0, 1.0);
    mix[i] = alpha * w1[i] + beta * w2[i];
  }
  const iid::PixelField a1 = iid::cam_attention(f, {w1});
  const iid::PixelField a2 = iid::cam_attention(f, {w2});
  const iid::PixelField am = iid::cam_attention(f, {mix});
  for (std::size_t i = 0; i < am.v.size(); ++i)
    CHECK(std::abs(am.v[i] - (alpha * a1.v[i] + beta * a2.v[i])) < 1e-12);
}

TEST_CASE("cam: weight-count mismatch throws") {
  const FeatureStack f = random_stack(83, 3, 4, 4);
  CHECK_THROWS_AS(iid::cam_attention(f, {{1.0, 2.0}}), iid::InvalidInput);
}

TEST_CASE("cam heat: constant map pins to mid-gray") {
  const FeatureStack f(2, 3, 3, 0.4);
  const iid::Image heat = iid::cam_attention_heat(f, {{1.0, 1.0}});
  for (int y = 0; y < 3; ++y)
    for (int x = 0; x < 3; ++x)
      CHECK(heat.at(y, x) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("instance norm: per-map standardization") {
  const FeatureStack f = random_stack(84, 3, 9, 8);
  const FeatureStack n = iid::instance_norm(f);
  for (int i = 0; i < 3; ++i) {
    double mean = 0.0, var = 0.0;
    for (int y = 0; y < 9; ++y)
      for (int x = 0; x < 8; ++x) mean += n.at(i, y, x);
    mean /= 72.0;
    for (int y = 0; y < 9; ++y)
      for (int x = 0; x < 8; ++x)
        var += (n.at(i, y, x) - mean) * (n.at(i, y, x) - mean);
    var /= 72.0;
    CHECK(std::abs(mean) < 1e-6);
    CHECK(std::abs(var - 1.0) < 1e-3);  // off by var/(var+eps)
  }
}

TEST_CASE("layer norm: whole-stack standardization") {
  const FeatureStack f = random_stack(85, 3, 6, 6);
  const FeatureStack n = iid::layer_norm(f);
  double mean = 0.0, var = 0.0;
  for (double v : n.v) mean += v;
  mean /= static_cast<double>(n.v.size());
  for (double v : n.v) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n.v.size());
  CHECK(std::abs(mean) < 1e-6);
  CHECK(std::abs(var - 1.0) < 1e-3);
  // Per-map means generally do NOT vanish under layer norm.
  double m0 = 0.0;
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x) m0 += n.at(0, y, x);
  CHECK(std::abs(m0 / 36.0) > 1e-6);
}

TEST_CASE("lin norm: endpoints reproduce IN and LN bitwise") {
  const FeatureStack f = random_stack(86, 4, 5, 7);
  const std::vector<double> gamma(4, 1.0), beta(4, 0.0);
  const FeatureStack at0 = iid::lin_norm(f, gamma, beta, 0.0);
  const FeatureStack in = iid::instance_norm(f);
  for (std::size_t i = 0; i < f.v.size(); ++i) CHECK(at0.v[i] == in.v[i]);
  const FeatureStack at1 = iid::lin_norm(f, gamma, beta, 1.0);
  const FeatureStack ln = iid::layer_norm(f);
  for (std::size_t i = 0; i < f.v.size(); ++i) CHECK(at1.v[i] == ln.v[i]);
}

TEST_CASE("lin norm: affine parameters and validation") {
  const FeatureStack f = random_stack(87, 2, 4, 4);
  const std::vector<double> gamma = {2.0, -0.5};
  const std::vector<double> beta = {0.25, 1.0};
  const FeatureStack out = iid::lin_norm(f, gamma, beta, 0.3);
  const std::vector<double> unit_g(2, 1.0), zero_b(2, 0.0);
  const FeatureStack plain = iid::lin_norm(f, unit_g, zero_b, 0.3);
  for (int i = 0; i < 2; ++i)
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x)
        CHECK(out.at(i, y, x) ==
              doctest::Approx(gamma[i] * plain.at(i, y, x) + beta[i])
                  .epsilon(1e-12));
  CHECK_THROWS_AS(iid::lin_norm(f, unit_g, zero_b, -0.1),
                  iid::InvalidParameter);
  CHECK_THROWS_AS(iid::lin_norm(f, unit_g, zero_b, 1.1),
                  iid::InvalidParameter);
  CHECK_THROWS_AS(iid::lin_norm(f, {1.0}, zero_b, 0.5), iid::InvalidInput);
}

TEST_CASE("feature stack io: float32 roundtrip") {
  testsup::TempDir dir("fstk");
  FeatureStack f = random_stack(88, 3, 4, 5);
  // Snap to float precision so the roundtrip is exact.
  for (auto& v : f.v) v = static_cast<double>(static_cast<float>(v));
  iid::save_feature_stack(f, dir.file("a.fstk"));
  const FeatureStack back = iid::load_feature_stack(dir.file("a.fstk"));
  REQUIRE(back.count == 3);
  REQUIRE(back.height == 4);
  REQUIRE(back.width == 5);
  for (std::size_t i = 0; i < f.v.size(); ++i) CHECK(back.v[i] == f.v[i]);
}

TEST_CASE("feature stack io: rejects garbage") {
  testsup::TempDir dir("fstkbad");
  {
    std::ofstream out(dir.file("bad.fstk"), std::ios::binary);
    out << "NOPE this is not a feature stack";
  }
  CHECK_THROWS_AS(iid::load_feature_stack(dir.file("bad.fstk")),
                  iid::IoError);
  CHECK_THROWS_AS(iid::load_feature_stack(dir.file("missing.fstk")),
                  iid::IoError);
}

TEST_CASE("classifier weights io") {
  testsup::TempDir dir("cw");
  {
    std::ofstream out(dir.file("w.json"));
    out << "{\"weights\": [0.5, -1.5, 2.0]}";
  }
  const ClassifierWeights cw =
      iid::load_classifier_weights(dir.file("w.json"));
  REQUIRE(cw.w.size() == 3);
  CHECK(cw.w[1] == -1.5);
  {
    std::ofstream out(dir.file("bad.json"));
    out << "{\"nope\": 1}";
  }
  CHECK_THROWS_AS(iid::load_classifier_weights(dir.file("bad.json")),
                  iid::IoError);
}

TEST_CASE("render heatmap: 3-channel output in range") {
  iid::PixelField map(4, 4, 1);
  iid::Rng rng(89);
  for (auto& v : map.v) v = rng.uniform(-2.0, 2.0);
  const iid::Image img = iid::render_heatmap(map);
  REQUIRE(img.channels() == 3);
  for (std::size_t i = 0; i < img.size(); ++i) {
    CHECK(img.data()[i] >= 0.0);
    CHECK(img.data()[i] <= 1.0);
  }
}
