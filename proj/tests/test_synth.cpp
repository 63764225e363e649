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
#include "iid/error.hpp"
#include "iid/imageio.hpp"
#include "iid/synth.hpp"
#include "json.hpp"
#include "support.hpp"

using iid::Image;

TEST_CASE("planckian: unit channel mean and temperature ordering") {
  for (double t : {2500.0, 4000.0, 6500.0, 12000.0}) {
    const auto rgb = iid::planckian_rgb(t);
    CHECK(rgb[0] + rgb[1] + rgb[2] == doctest::Approx(3.0).epsilon(1e-12));
    for (double c : rgb) CHECK(c > 0.0);
  }
  const auto warm = iid::planckian_rgb(3000.0);
  const auto cool = iid::planckian_rgb(10000.0);
  CHECK(warm[0] > warm[2]);  // warm light leans red
  CHECK(cool[2] > cool[0]);  // cool light leans blue
  CHECK_THROWS_AS(iid::planckian_rgb(2000.0), iid::InvalidParameter);
  CHECK_THROWS_AS(iid::planckian_rgb(13000.0), iid::InvalidParameter);
}

TEST_CASE("planckian: matches the closed-form Wien ratio") {
  // Independent hand computation: response_c = l_c^-5 exp(-c2 / (l_c T)),
  // normalized to channel mean one.
  const double t = 5200.0;
  const double lam[3] = {610.0, 540.0, 450.0};
  const double c2 = 1.4388e7;
  double raw[3], sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    raw[c] = std::pow(lam[c], -5.0) * std::exp(-c2 / (lam[c] * t));
    sum += raw[c];
  }
  const auto got = iid::planckian_rgb(t);
  for (int c = 0; c < 3; ++c)
    CHECK(got[c] == doctest::Approx(3.0 * raw[c] / sum).epsilon(1e-12));
}

TEST_CASE("shadow scene: determinism, reconstruction, oracle range") {
  iid::ShadowSceneParams params;
  params.seed = 77;
  params.height = 48;
  params.width = 40;
  params.n_patches = 6;
  const iid::ShadowScene a = iid::gen_shadow_scene(params);
  const iid::ShadowScene b = iid::gen_shadow_scene(params);
  REQUIRE(a.image.size() == b.image.size());
  for (std::size_t i = 0; i < a.image.size(); ++i)
    CHECK(a.image.data()[i] == b.image.data()[i]);  // bit-exact

  CHECK(a.oracle_theta_deg >= 0.0);
  CHECK(a.oracle_theta_deg < 180.0);

  // I = R * S (broadcast) to 1e-6.
  double worst = 0.0;
  for (std::size_t p = 0; p < a.image.pixels(); ++p)
    for (int c = 0; c < 3; ++c)
      worst = std::max(
          worst, std::abs(a.image.data()[3 * p + c] -
                          a.reflectance_gt.data()[3 * p + c] *
                              a.shading_gt.data()[p]));
  CHECK(worst < 1e-6);

  // Mask values in [0, 1]; shading positive.
  for (std::size_t p = 0; p < a.image.pixels(); ++p) {
    CHECK(a.shadow_mask.data()[p] >= 0.0);
    CHECK(a.shadow_mask.data()[p] <= 1.0);
    CHECK(a.shading_gt.data()[p] > 0.0);
  }
}

TEST_CASE("shadow scene: different seeds differ") {
  iid::ShadowSceneParams params;
  params.height = 32;
  params.width = 32;
  params.seed = 1;
  const iid::ShadowScene a = iid::gen_shadow_scene(params);
  params.seed = 2;
  const iid::ShadowScene b = iid::gen_shadow_scene(params);
  double diff = 0.0;
  for (std::size_t i = 0; i < a.image.size(); ++i)
    diff = std::max(diff, std::abs(a.image.data()[i] - b.image.data()[i]));
  CHECK(diff > 1e-3);
}

TEST_CASE("shadow scene: lit/shadow ratio equals attenuation times "
          "illuminant ratio") {
  // Hard-edged shadow so lit and shadowed pixels are pure.
  iid::ShadowSceneParams params;
  params.seed = 9;
  params.height = 64;
  params.width = 64;
  params.softness = 0.0;
  params.attenuation = 0.42;
  params.lit_temp = 6400.0;
  params.shadow_temp = 3600.0;
  const iid::ShadowScene scene = iid::gen_shadow_scene(params);

  // Independent Wien responses for both illuminants.
  const double lam[3] = {610.0, 540.0, 450.0};
  const double c2 = 1.4388e7;
  double lit[3], sh[3], sl = 0.0, ss = 0.0;
  for (int c = 0; c < 3; ++c) {
    lit[c] = std::pow(lam[c], -5.0) * std::exp(-c2 / (lam[c] * 6400.0));
    sh[c] = std::pow(lam[c], -5.0) * std::exp(-c2 / (lam[c] * 3600.0));
    sl += lit[c];
    ss += sh[c];
  }
  for (int c = 0; c < 3; ++c) {
    lit[c] *= 3.0 / sl;
    sh[c] *= 3.0 / ss;
  }

  // Find a patch with pixels on both sides of the mask, then compare a
  // lit and a shadowed pixel of the same patch channel-wise.
  const auto& ids = scene.patch_ids;
  bool checked = false;
  for (int id = 0; id < 16 && !checked; ++id) {
    int lit_idx = -1, sh_idx = -1;
    for (std::size_t p = 0; p < scene.image.pixels(); ++p) {
      if (ids[p] != id) continue;
      if (scene.shadow_mask.data()[p] == 0.0) lit_idx = static_cast<int>(p);
      if (scene.shadow_mask.data()[p] == 1.0) sh_idx = static_cast<int>(p);
    }
    if (lit_idx < 0 || sh_idx < 0) continue;
    for (int c = 0; c < 3; ++c) {
      const double ratio = scene.image.data()[3 * sh_idx + c] /
                           scene.image.data()[3 * lit_idx + c];
      const double expect = params.attenuation * sh[c] / lit[c];
      CHECK(ratio == doctest::Approx(expect).epsilon(1e-9));
    }
    checked = true;
  }
  CHECK(checked);
}

TEST_CASE("shadow scene: attenuation near one hides the mask") {
  iid::ShadowSceneParams params;
  params.seed = 3;
  params.height = 32;
  params.width = 32;
  params.lit_temp = 5000.0;
  params.shadow_temp = 5000.0;
  params.attenuation = 1.0 - 1e-12;
  const iid::ShadowScene shadowed = iid::gen_shadow_scene(params);
  // With equal temperatures and no attenuation the shading layer is flat.
  for (std::size_t p = 0; p < shadowed.image.pixels(); ++p)
    CHECK(shadowed.shading_gt.data()[p] ==
          doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(
      [&] {
        params.attenuation = 0.0;
        iid::gen_shadow_scene(params);
      }(),
      iid::InvalidParameter);
}

TEST_CASE("specular scene: additivity, achromatic lobes, determinism") {
  iid::SpecularSceneParams params;
  params.seed = 21;
  params.height = 48;
  params.width = 48;
  const iid::SpecularScene a = iid::gen_specular_scene(params);
  const iid::SpecularScene b = iid::gen_specular_scene(params);
  for (std::size_t i = 0; i < a.image.size(); ++i)
    CHECK(a.image.data()[i] == b.image.data()[i]);

  // image = diffuse + specular exactly, specular shared across channels.
  for (std::size_t p = 0; p < a.image.pixels(); ++p)
    for (int c = 0; c < 3; ++c)
      CHECK(a.image.data()[3 * p + c] ==
            a.diffuse.data()[3 * p + c] + a.specular.data()[p]);

  // diffuse = reflectance * shading.
  double worst = 0.0;
  for (std::size_t p = 0; p < a.image.pixels(); ++p)
    for (int c = 0; c < 3; ++c)
      worst = std::max(worst,
                       std::abs(a.diffuse.data()[3 * p + c] -
                                a.reflectance_gt.data()[3 * p + c] *
                                    a.shading_gt.data()[p]));
  CHECK(worst < 1e-12);
}

TEST_CASE("specular scene: zero lobes reduce to the diffuse render") {
  iid::SpecularSceneParams params;
  params.seed = 4;
  params.height = 32;
  params.width = 32;
  params.n_lobes = 0;
  const iid::SpecularScene scene = iid::gen_specular_scene(params);
  for (std::size_t i = 0; i < scene.image.size(); ++i)
    CHECK(scene.image.data()[i] == scene.diffuse.data()[i]);
  CHECK_FALSE(scene.clipped);
}

TEST_CASE("specular scene: white-offset invariance of the specular-free "
          "transform") {
  iid::SpecularSceneParams params;
  params.seed = 33;
  params.height = 40;
  params.width = 40;
  params.lobe_strength = 0.2;
  const iid::SpecularScene scene = iid::gen_specular_scene(params);
  REQUIRE_FALSE(scene.clipped);
  const Image from_full = iid::specular_free(scene.image, 0.5);
  const Image from_diffuse = iid::specular_free(scene.diffuse, 0.5);
  double worst = 0.0;
  for (std::size_t i = 0; i < from_full.size(); ++i)
    worst = std::max(worst,
                     std::abs(from_full.data()[i] - from_diffuse.data()[i]));
  CHECK(worst < 1e-10);
}

TEST_CASE("synth bundles: files land on disk and metadata parses") {
  testsup::TempDir dir("bundle");
  iid::ShadowSceneParams sp;
  sp.seed = 2;
  sp.height = 32;
  sp.width = 32;
  const iid::ShadowScene scene = iid::gen_shadow_scene(sp);
  const auto names = iid::write_shadow_bundle(scene, dir.path());
  CHECK(names.size() == 6);
  for (const auto& n : names) CHECK(std::filesystem::exists(dir.file(n)));

  std::ifstream meta(dir.file("metadata.json"));
  const nlohmann::json j = nlohmann::json::parse(meta);
  CHECK(j.at("seed").get<std::uint64_t>() == 2);
  CHECK(j.at("oracle_theta_deg").get<double>() ==
        doctest::Approx(scene.oracle_theta_deg));

  // patch ids survive the 16-bit gray encoding exactly.
  const Image ids = iid::load_image(dir.file("patch_ids.png"));
  for (std::size_t p = 0; p < ids.size(); ++p)
    CHECK(static_cast<int>(std::lround(ids.data()[p] * 65535.0)) ==
          scene.patch_ids[p]);

  iid::SpecularSceneParams qp;
  qp.seed = 3;
  qp.height = 32;
  qp.width = 32;
  testsup::TempDir dir2("bundle_spec");
  const auto names2 =
      iid::write_specular_bundle(iid::gen_specular_scene(qp), dir2.path());
  CHECK(names2.size() == 7);
  for (const auto& n : names2) CHECK(std::filesystem::exists(dir2.file(n)));
}
