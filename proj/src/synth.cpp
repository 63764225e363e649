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

#include "iid/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "iid/imageio.hpp"
#include "iid/rng.hpp"
#include "iid/shadowfree.hpp"
#include "json.hpp"

namespace iid {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Sensor wavelengths (nm) and second radiation constant (nm * K).
constexpr double kLambdaNm[3] = {610.0, 540.0, 450.0};
constexpr double kC2 = 1.4388e7;

// Albedo channel mean shared by every patch: patches differ in chromaticity
// only, so ground-truth reflectance carries no luminance texture and the
// scalar shading field is exact.
constexpr double kPatchLuminance = 0.4;

struct Chroma2 {
  double u, v;
};

// Random chromaticities in the log-chromaticity plane: inside a disc, away
// from the achromatic point, pairwise separated so the entropy sweep sees
// distinct clusters. Rejection keeps the stream deterministic.
std::vector<Chroma2> sample_chromas(Rng& rng, int n) {
  constexpr double kDiscRadius = 0.25;
  constexpr double kMinNorm = 0.05;
  constexpr double kMinSep = 0.06;
  std::vector<Chroma2> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Chroma2 c{0.0, 0.0};
    for (int tries = 0; tries < 1000; ++tries) {
      c.u = rng.uniform(-kDiscRadius, kDiscRadius);
      c.v = rng.uniform(-kDiscRadius, kDiscRadius);
      const double norm = std::hypot(c.u, c.v);
      if (norm > kDiscRadius || norm < kMinNorm) continue;
      bool ok = true;
      for (const Chroma2& prev : out)
        if (std::hypot(c.u - prev.u, c.v - prev.v) < kMinSep) {
          ok = false;
          break;
        }
      if (ok) break;
    }
    out.push_back(c);
  }
  return out;
}

// Lift a plane chromaticity to a 3-channel albedo with channel mean
// kPatchLuminance.
std::array<double, 3> albedo_from_chroma(const Chroma2& c) {
  std::array<double, 3> a{};
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    a[k] = std::exp(c.u * kLogChromaU1[k] + c.v * kLogChromaU2[k]);
    sum += a[k];
  }
  for (int k = 0; k < 3; ++k) a[k] *= 3.0 * kPatchLuminance / sum;
  return a;
}

// Paint patch labels: background 0, then axis-aligned rectangles 1..n-1,
// later ids on top. Every rectangle is anchored on the shadow line: a patch
// confined to one side of the shadow contributes a single chromaticity
// cluster that carries no information about the illumination direction, and
// enough of those make the entropy sweep underdetermined. Straddling
// patches sample both illuminants by construction.
std::vector<int> paint_patches(Rng& rng, int h, int w, int n_patches,
                               double cx, double cy, double nx, double ny) {
  std::vector<int> ids(static_cast<std::size_t>(h) * w, 0);
  const double span = 0.5 * std::hypot(h, w);
  for (int id = 1; id < n_patches; ++id) {
    const int rh = std::max(2, static_cast<int>(std::lround(
                                   rng.uniform(0.18, 0.45) * h)));
    const int rw = std::max(2, static_cast<int>(std::lround(
                                   rng.uniform(0.18, 0.45) * w)));
    // A point on the line, clamped into frame, lands inside the rectangle.
    const double t = rng.uniform(-0.9, 0.9) * span;
    const double ax = std::clamp(cx - t * ny, 0.0, w - 1.0);
    const double ay = std::clamp(cy + t * nx, 0.0, h - 1.0);
    const int x0 = std::clamp(
        static_cast<int>(std::lround(ax - rng.uniform(0.2, 0.8) * rw)), 0,
        std::max(0, w - rw));
    const int y0 = std::clamp(
        static_cast<int>(std::lround(ay - rng.uniform(0.2, 0.8) * rh)), 0,
        std::max(0, h - rh));
    for (int y = y0; y < std::min(h, y0 + rh); ++y)
      for (int x = x0; x < std::min(w, x0 + rw); ++x)
        ids[static_cast<std::size_t>(y) * w + x] = id;
  }
  return ids;
}

// Free placement for scenes without a shadow line.
std::vector<int> paint_patches(Rng& rng, int h, int w, int n_patches) {
  std::vector<int> ids(static_cast<std::size_t>(h) * w, 0);
  for (int id = 1; id < n_patches; ++id) {
    const int rh = std::max(2, static_cast<int>(std::lround(
                                   rng.uniform(0.18, 0.45) * h)));
    const int rw = std::max(2, static_cast<int>(std::lround(
                                   rng.uniform(0.18, 0.45) * w)));
    const int y0 = rng.uniform_int(0, std::max(0, h - rh));
    const int x0 = rng.uniform_int(0, std::max(0, w - rw));
    for (int y = y0; y < std::min(h, y0 + rh); ++y)
      for (int x = x0; x < std::min(w, x0 + rw); ++x)
        ids[static_cast<std::size_t>(y) * w + x] = id;
  }
  return ids;
}

void check_scene_dims(int h, int w, int n_patches) {
  if (h < 16 || w < 16)
    throw InvalidParameter("scene dimensions must be at least 16x16");
  if (n_patches < 2 || n_patches > 256)
    throw InvalidParameter("n_patches must lie in [2, 256]");
}

void save16(const Image& img, const std::string& path) {
  save_image(img, path, /*assume_srgb=*/false, /*bit_depth=*/16);
}

}  // namespace

std::array<double, 3> planckian_rgb(double temp_k) {
  if (!(temp_k >= 2500.0 && temp_k <= 12000.0))
    throw InvalidParameter("illuminant temperature must lie in [2500, 12000]");
  std::array<double, 3> e{};
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    e[c] = std::pow(kLambdaNm[c], -5.0) *
           std::exp(-kC2 / (kLambdaNm[c] * temp_k));
    sum += e[c];
  }
  for (int c = 0; c < 3; ++c) e[c] *= 3.0 / sum;
  return e;
}

ShadowScene gen_shadow_scene(const ShadowSceneParams& params) {
  check_scene_dims(params.height, params.width, params.n_patches);
  if (!(params.attenuation > 0.0 && params.attenuation < 1.0))
    throw InvalidParameter("attenuation must lie in (0, 1)");
  if (!(params.softness >= 0.0 && params.softness <= 32.0))
    throw InvalidParameter("softness must lie in [0, 32]");
  const auto e_lit = planckian_rgb(params.lit_temp);
  const auto e_sh = planckian_rgb(params.shadow_temp);

  const int h = params.height, w = params.width;
  Rng rng(params.seed);
  const auto chromas = sample_chromas(rng, params.n_patches);
  std::vector<std::array<double, 3>> albedos(chromas.size());
  for (std::size_t i = 0; i < chromas.size(); ++i)
    albedos[i] = albedo_from_chroma(chromas[i]);

  // Soft half-plane shadow through a point near the center, drawn before
  // the patches so that every rectangle can be anchored on it. The erf
  // profile is the exact Gaussian blur of a straight step edge.
  const double phi = rng.uniform(0.0, 2.0 * kPi);
  const double cx = 0.5 * (w - 1) + rng.uniform(-0.15, 0.15) * w;
  const double cy = 0.5 * (h - 1) + rng.uniform(-0.15, 0.15) * h;
  const double nx = std::cos(phi), ny = std::sin(phi);

  ShadowScene scene;
  scene.params = params;
  scene.patch_ids =
      paint_patches(rng, h, w, params.n_patches, cx, cy, nx, ny);

  scene.image = Image(h, w, 3);
  scene.reflectance_gt = Image(h, w, 3);
  scene.shading_gt = Image(h, w, 1);
  scene.shadow_mask = Image(h, w, 1);
  // The penumbra mixes the two illuminants geometrically (linearly in the
  // log domain). The log-chromaticity of a penumbra pixel then lies exactly
  // on the segment between its patch's lit and shadow clusters, so soft
  // edges feed the entropy sweep instead of smearing points off the
  // two-cluster axis; shading stays a pure scalar (attenuation^mask).
  const std::array<double, 3> log_lit{
      std::log(e_lit[0]), std::log(e_lit[1]), std::log(e_lit[2])};
  const std::array<double, 3> log_sh{
      std::log(e_sh[0]), std::log(e_sh[1]), std::log(e_sh[2])};
  const double log_att = std::log(params.attenuation);
  double maxval = 0.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      const double d = (x - cx) * nx + (y - cy) * ny;
      double m;
      if (params.softness < 1e-9) {
        m = d > 0.0 ? 1.0 : (d < 0.0 ? 0.0 : 0.5);
      } else {
        m = 0.5 * (1.0 + std::erf(d / (params.softness * std::sqrt(2.0))));
      }
      const double s = std::exp(m * log_att);
      scene.shadow_mask.data()[p] = m;
      scene.shading_gt.data()[p] = s;
      const auto& a = albedos[scene.patch_ids[p]];
      for (int c = 0; c < 3; ++c) {
        const double light =
            std::exp((1.0 - m) * log_lit[c] + m * (log_att + log_sh[c]));
        const double val = a[c] * light;
        scene.image.data()[3 * p + c] = val;
        scene.reflectance_gt.data()[3 * p + c] = val / s;
        maxval = std::max(maxval, val);
      }
    }
  }
  // Defensive headroom rescale (scale-invariant for every consumer). With
  // the default luminance and temperature ranges this is a no-op.
  if (maxval > 0.98) {
    const double s = 0.98 / maxval;
    for (std::size_t i = 0; i < scene.image.size(); ++i) {
      scene.image.data()[i] *= s;
      scene.reflectance_gt.data()[i] *= s;
    }
  }

  // The two lights differ along a fixed direction in the log-chromaticity
  // plane; the invariant axis is orthogonal to it. Shadow attenuation is a
  // scalar and cancels in the plane projection.
  double du = 0.0, dv = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double dl = std::log(e_lit[c]) - std::log(e_sh[c]);
    du += dl * kLogChromaU1[c];
    dv += dl * kLogChromaU2[c];
  }
  double theta = std::atan2(dv, du) * 180.0 / kPi + 90.0;
  while (theta < 0.0) theta += 180.0;
  while (theta >= 180.0) theta -= 180.0;
  scene.oracle_theta_deg = theta;
  return scene;
}

SpecularScene gen_specular_scene(const SpecularSceneParams& params) {
  check_scene_dims(params.height, params.width, params.n_patches);
  if (params.n_lobes < 0 || params.n_lobes > 16)
    throw InvalidParameter("n_lobes must lie in [0, 16]");
  if (!(params.lobe_strength >= 0.0 && params.lobe_strength <= 0.5))
    throw InvalidParameter("lobe_strength must lie in [0, 0.5]");
  if (!(params.lobe_sigma >= 1.0 && params.lobe_sigma <= 64.0))
    throw InvalidParameter("lobe_sigma must lie in [1, 64]");

  const int h = params.height, w = params.width;
  Rng rng(params.seed);
  const auto chromas = sample_chromas(rng, params.n_patches);
  std::vector<std::array<double, 3>> albedos(chromas.size());
  for (std::size_t i = 0; i < chromas.size(); ++i)
    albedos[i] = albedo_from_chroma(chromas[i]);
  const std::vector<int> ids = paint_patches(rng, h, w, params.n_patches);

  // Smooth shading: linear ramp along a random direction, mapped to
  // [0.55, 0.95] across the frame.
  const double psi = rng.uniform(0.0, 2.0 * kPi);
  const double rx = std::cos(psi), ry = std::sin(psi);
  double tmin = 1e300, tmax = -1e300;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double t = x * rx + y * ry;
      tmin = std::min(tmin, t);
      tmax = std::max(tmax, t);
    }
  const double tspan = std::max(tmax - tmin, 1e-12);

  // Separated highlight lobes so amplitudes never stack.
  struct Lobe {
    double cx, cy, sigma, amp;
  };
  std::vector<Lobe> lobes;
  for (int i = 0; i < params.n_lobes; ++i) {
    Lobe lb{};
    for (int tries = 0; tries < 200; ++tries) {
      lb.sigma = params.lobe_sigma * rng.uniform(0.7, 1.3);
      lb.amp = params.lobe_strength * rng.uniform(0.6, 1.0);
      lb.cx = rng.uniform(0.1 * w, 0.9 * w);
      lb.cy = rng.uniform(0.1 * h, 0.9 * h);
      bool ok = true;
      for (const Lobe& prev : lobes)
        if (std::hypot(lb.cx - prev.cx, lb.cy - prev.cy) <
            2.5 * (lb.sigma + prev.sigma)) {
          ok = false;
          break;
        }
      if (ok) break;
    }
    lobes.push_back(lb);
  }

  SpecularScene scene;
  scene.params = params;
  scene.image = Image(h, w, 3);
  scene.diffuse = Image(h, w, 3);
  scene.specular = Image(h, w, 1);
  scene.reflectance_gt = Image(h, w, 3);
  scene.shading_gt = Image(h, w, 1);
  scene.lobe_mask = Image(h, w, 1);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t p = static_cast<std::size_t>(y) * w + x;
      const double t = (x * rx + y * ry - tmin) / tspan;
      const double s = 0.55 + 0.4 * t;
      double spec = 0.0;
      for (const Lobe& lb : lobes) {
        const double r2 = (x - lb.cx) * (x - lb.cx) + (y - lb.cy) * (y - lb.cy);
        spec += lb.amp * std::exp(-r2 / (2.0 * lb.sigma * lb.sigma));
      }
      scene.shading_gt.data()[p] = s;
      scene.specular.data()[p] = spec;
      scene.lobe_mask.data()[p] = spec > 1e-3 ? 1.0 : 0.0;
      const auto& a = albedos[ids[p]];
      for (int c = 0; c < 3; ++c) {
        const double diff = a[c] * s;
        scene.diffuse.data()[3 * p + c] = diff;
        scene.reflectance_gt.data()[3 * p + c] = a[c];
        const double val = diff + spec;
        scene.image.data()[3 * p + c] = val;
        if (val > 1.0) scene.clipped = true;
      }
    }
  }
  return scene;
}

namespace {

// patch ids ride in a 16-bit gray PNG as id/65535, exactly recoverable by
// rounding.
Image ids_to_image(const std::vector<int>& ids, int h, int w) {
  Image img(h, w, 1);
  for (std::size_t p = 0; p < ids.size(); ++p)
    img.data()[p] = static_cast<double>(ids[p]) / 65535.0;
  return img;
}

void write_metadata(const nlohmann::json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed to write '" + path + "'");
}

}  // namespace

std::vector<std::string> write_shadow_bundle(const ShadowScene& scene,
                                             const std::string& dir) {
  const std::vector<std::string> names = {
      "image.png",       "reflectance_gt.png", "shading_gt.png",
      "shadow_mask.png", "patch_ids.png",      "metadata.json"};
  save16(scene.image, dir + "/" + names[0]);
  save16(scene.reflectance_gt, dir + "/" + names[1]);
  save16(scene.shading_gt, dir + "/" + names[2]);
  save16(scene.shadow_mask, dir + "/" + names[3]);
  save16(ids_to_image(scene.patch_ids, scene.image.height(),
                      scene.image.width()),
         dir + "/" + names[4]);
  nlohmann::json j{{"kind", "shadow"},
                   {"seed", scene.params.seed},
                   {"height", scene.params.height},
                   {"width", scene.params.width},
                   {"n_patches", scene.params.n_patches},
                   {"lit_temp", scene.params.lit_temp},
                   {"shadow_temp", scene.params.shadow_temp},
                   {"attenuation", scene.params.attenuation},
                   {"softness", scene.params.softness},
                   {"oracle_theta_deg", scene.oracle_theta_deg}};
  write_metadata(j, dir + "/" + names[5]);
  return names;
}

std::vector<std::string> write_specular_bundle(const SpecularScene& scene,
                                               const std::string& dir) {
  const std::vector<std::string> names = {
      "image.png",      "diffuse.png",    "specular.png", "reflectance_gt.png",
      "shading_gt.png", "lobe_mask.png",  "metadata.json"};
  save16(scene.image, dir + "/" + names[0]);
  save16(scene.diffuse, dir + "/" + names[1]);
  save16(scene.specular, dir + "/" + names[2]);
  save16(scene.reflectance_gt, dir + "/" + names[3]);
  save16(scene.shading_gt, dir + "/" + names[4]);
  save16(scene.lobe_mask, dir + "/" + names[5]);
  nlohmann::json j{{"kind", "specular"},
                   {"seed", scene.params.seed},
                   {"height", scene.params.height},
                   {"width", scene.params.width},
                   {"n_patches", scene.params.n_patches},
                   {"n_lobes", scene.params.n_lobes},
                   {"lobe_strength", scene.params.lobe_strength},
                   {"lobe_sigma", scene.params.lobe_sigma},
                   {"clipped", scene.clipped}};
  write_metadata(j, dir + "/" + names[6]);
  return names;
}

}  // namespace iid
