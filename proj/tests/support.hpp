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

// Shared fixtures for the unit and acceptance suites. The finite-difference
// fixtures are "screened": every absolute-value kink, channel argmax, and
// clamp boundary touched by the losses must sit several step sizes away from
// zero, otherwise the fixture is redrawn under the next seed. Central
// differences of |x| are exact once |x| >= h, so screened fixtures make the
// comparison against analytic gradients well-posed rather than loosening
// tolerances.

#pragma once

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "iid/image.hpp"
#include "iid/losses.hpp"
#include "iid/rng.hpp"
#include "iid/specularfree.hpp"

namespace testsup {

inline iid::Image random_image(std::uint64_t seed, int h, int w, int c,
                               double lo, double hi) {
  iid::Rng rng(seed);
  iid::Image img(h, w, c);
  for (std::size_t i = 0; i < img.size(); ++i)
    img.data()[i] = rng.uniform(lo, hi);
  return img;
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = (std::filesystem::temp_directory_path() /
             ("iid_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter.fetch_add(1))))
                .string();
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::string& path() const { return path_; }
  std::string file(const std::string& name) const { return path_ + "/" + name; }

 private:
  std::string path_;
};

// --- kink screening -------------------------------------------------------

inline bool min_abs_at_least(const iid::PixelField& f, double margin) {
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x)
      for (int c = 0; c < f.channels; ++c) {
        // Structural zeros (last gradient column/row) stay zero under any
        // perturbation, so both analytic and central differences agree there.
        const bool structural = f.at(y, x, c) == 0.0;
        if (!structural && std::abs(f.at(y, x, c)) < margin) return false;
      }
  return true;
}

inline bool gradients_clear(const iid::Image& img, double margin) {
  for (int level = 1; level <= 3; ++level) {
    const iid::GradientField g = iid::gradient(iid::downsample(img, level));
    if (!min_abs_at_least(g.dx, margin) || !min_abs_at_least(g.dy, margin))
      return false;
  }
  return true;
}

inline bool abs_diff_clear(const iid::Image& a, const iid::Image& b,
                           double margin) {
  if (!a.same_shape(b)) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a.data()[i] - b.data()[i]) < margin) return false;
  return true;
}

// The specular-free transform of R must keep each channel away from its
// zero clamp and keep the running channel maximum unambiguous.
inline bool specfree_clear(const iid::Image& r, double lambda, double margin) {
  const double denom = 1.0 - 3.0 * lambda;
  for (std::size_t p = 0; p < r.pixels(); ++p) {
    const double a = r.data()[3 * p], b = r.data()[3 * p + 1],
                 c = r.data()[3 * p + 2];
    double v[3] = {a, b, c};
    std::sort(v, v + 3);
    if (v[2] - v[1] < margin) return false;  // ambiguous argmax
    const double m = (v[2] - lambda * (a + b + c)) / denom;
    for (double ch : {a, b, c})
      if (std::abs(ch - m) < margin) return false;  // near the zero clamp
  }
  return true;
}

// One joint fixture covering every stage-1 term: reflectance, shading,
// observed image, and priors, all screened together.
struct FdFixture {
  iid::Image image;  // observed input (reconstruction target)
  iid::Image r;      // 3-channel reflectance iterate
  iid::Image s;      // 1-channel shading iterate
  iid::Priors priors;
};

inline iid::Image broadcast_product(const iid::Image& r, const iid::Image& s) {
  iid::Image out(r.height(), r.width(), r.channels());
  for (std::size_t p = 0; p < r.pixels(); ++p)
    for (int c = 0; c < r.channels(); ++c)
      out.data()[3 * p + c] = r.data()[3 * p + c] * s.data()[p];
  return out;
}

// A central difference at step h crosses a kink of |arg| only when
// |arg| < s*h, where s is the sensitivity of arg to the perturbed value.
// Margins are set to at least twice the worst-case s*h for h = 1e-4:
// gradients and residuals have s <= 1.2, chromaticity-space terms s <= 2.7
// (the 1/sum amplification), specular-free terms s <= 2 (through the
// channel max). Much wider margins would make rejection sampling
// intractable: every pixel of every screen has to clear at once.
inline FdFixture make_fd_fixture(std::uint64_t seed, int h, int w,
                                 double margin = 2.5e-4) {
  const double chroma_margin = 6e-4;
  for (int attempt = 0; attempt < 400; ++attempt) {
    const std::uint64_t base = seed + 1000ULL * attempt;
    FdFixture fx;
    fx.r = random_image(base, h, w, 3, 0.25, 1.2);
    fx.s = random_image(base + 1, h, w, 1, 0.25, 1.2);
    fx.image = random_image(base + 2, h, w, 3, 0.25, 1.2);
    fx.priors.lambda = iid::kDefaultMaxChroma;
    fx.priors.rho_sf = iid::chromaticity(random_image(base + 3, h, w, 3,
                                                      0.25, 1.2));
    fx.priors.zeta_hf =
        iid::specular_free(random_image(base + 4, h, w, 3, 0.3, 1.2),
                           fx.priors.lambda);

    if (!abs_diff_clear(iid::chromaticity(fx.r), fx.priors.rho_sf,
                        chroma_margin))
      continue;
    if (!specfree_clear(fx.r, fx.priors.lambda, chroma_margin)) continue;
    if (!abs_diff_clear(iid::specular_free(fx.r, fx.priors.lambda),
                        fx.priors.zeta_hf, chroma_margin))
      continue;
    if (!gradients_clear(fx.r, margin) || !gradients_clear(fx.s, margin))
      continue;
    if (!abs_diff_clear(broadcast_product(fx.r, fx.s), fx.image, margin))
      continue;
    return fx;
  }
  throw std::runtime_error("could not screen an FD fixture in 400 attempts");
}

}  // namespace testsup
