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

#include "iid/shadowfree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace iid {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Linear-interpolated quantile of an ascending-sorted vector.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double pos = p * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

double population_std(const std::vector<double>& xs, std::size_t lo,
                      std::size_t hi) {
  const double n = static_cast<double>(hi - lo);
  double mean = 0.0;
  for (std::size_t i = lo; i < hi; ++i) mean += xs[i];
  mean /= n;
  double var = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double d = xs[i] - mean;
    var += d * d;
  }
  return std::sqrt(var / n);
}

}  // namespace

LogChromaticity log_chromaticity(const Image& img) {
  if (img.channels() != 3)
    throw InvalidInput("log_chromaticity requires a 3-channel image");
  LogChromaticity lc;
  lc.height = img.height();
  lc.width = img.width();
  const std::size_t n = img.pixels();
  lc.u.assign(n, 0.0);
  lc.v.assign(n, 0.0);
  lc.valid.assign(n, 0);
  const double* in = img.data();
  for (std::size_t p = 0; p < n; ++p) {
    const double r = in[3 * p], g = in[3 * p + 1], b = in[3 * p + 2];
    if (r <= kEpsBlack || g <= kEpsBlack || b <= kEpsBlack) continue;
    const double lr = std::log(r), lg = std::log(g), lb = std::log(b);
    lc.u[p] = lr * kLogChromaU1[0] + lg * kLogChromaU1[1] + lb * kLogChromaU1[2];
    lc.v[p] = lr * kLogChromaU2[0] + lg * kLogChromaU2[1] + lb * kLogChromaU2[2];
    lc.valid[p] = 1;
    ++lc.valid_count;
  }
  if (lc.valid_count < 2)
    throw DegenerateInput(
        "log_chromaticity: fewer than 2 pixels above the black threshold");
  return lc;
}

EntropyProfile entropy_profile(const LogChromaticity& lc) {
  if (lc.valid_count < 2)
    throw DegenerateInput("entropy_profile: fewer than 2 valid pixels");
  EntropyProfile profile;
  const std::size_t n = lc.u.size();
  std::vector<double> proj;
  proj.reserve(static_cast<std::size_t>(lc.valid_count));
  std::vector<std::size_t> hist;
  for (int angle = 0; angle < 180; ++angle) {
    const double t = angle * kPi / 180.0;
    const double ct = std::cos(t), st = std::sin(t);
    proj.clear();
    for (std::size_t p = 0; p < n; ++p)
      if (lc.valid[p]) proj.push_back(lc.u[p] * ct + lc.v[p] * st);
    std::sort(proj.begin(), proj.end());

    // Trim to the 5th-95th percentile span (inclusive) before binning so a
    // handful of outliers cannot dictate the bin width.
    const double q05 = quantile_sorted(proj, 0.05);
    const double q95 = quantile_sorted(proj, 0.95);
    const std::size_t lo =
        std::lower_bound(proj.begin(), proj.end(), q05) - proj.begin();
    const std::size_t hi =
        std::upper_bound(proj.begin(), proj.end(), q95) - proj.begin();
    const std::size_t nr = hi - lo;
    if (nr < 2) {
      profile.entropy_bits[angle] = 0.0;
      continue;
    }
    const double range = proj[hi - 1] - proj[lo];
    const double sigma = population_std(proj, lo, hi);
    // Scott's rule; sigma 0 or zero range collapses to a single bin.
    const double width =
        3.5 * sigma * std::pow(static_cast<double>(nr), -1.0 / 3.0);
    std::size_t bins = 1;
    if (width > 0.0 && range > 0.0) {
      const double b = std::ceil(range / width);
      bins = b < 1.0 ? 1 : (b > 256.0 ? 256 : static_cast<std::size_t>(b));
    }
    hist.assign(bins, 0);
    for (std::size_t i = lo; i < hi; ++i) {
      std::size_t b = range > 0.0
                          ? static_cast<std::size_t>((proj[i] - proj[lo]) /
                                                     range * bins)
                          : 0;
      if (b >= bins) b = bins - 1;
      ++hist[b];
    }
    double entropy = 0.0;
    for (std::size_t c : hist) {
      if (c == 0) continue;
      const double q = static_cast<double>(c) / static_cast<double>(nr);
      entropy -= q * std::log2(q);
    }
    profile.entropy_bits[angle] = entropy;
  }
  return profile;
}

int min_entropy_angle(const EntropyProfile& profile) {
  int best = 0;
  for (int a = 1; a < 180; ++a)
    if (profile.entropy_bits[a] < profile.entropy_bits[best]) best = a;
  return best;
}

Image invariant_grayscale_raw(const LogChromaticity& lc, double theta_deg) {
  if (!std::isfinite(theta_deg))
    throw InvalidParameter("invariant angle must be finite");
  const double t = theta_deg * kPi / 180.0;
  const double ct = std::cos(t), st = std::sin(t);
  Image out(lc.height, lc.width, 1);
  double* o = out.data();
  for (std::size_t p = 0; p < lc.u.size(); ++p)
    if (lc.valid[p]) o[p] = std::exp(lc.u[p] * ct + lc.v[p] * st);
  return out;
}

Image invariant_grayscale(const LogChromaticity& lc, double theta_deg) {
  Image raw = invariant_grayscale_raw(lc, theta_deg);
  std::vector<double> vals;
  vals.reserve(static_cast<std::size_t>(lc.valid_count));
  for (std::size_t p = 0; p < lc.valid.size(); ++p)
    if (lc.valid[p]) vals.push_back(raw.data()[p]);
  std::sort(vals.begin(), vals.end());
  const double p02 = quantile_sorted(vals, 0.02);
  const double p98 = quantile_sorted(vals, 0.98);
  const double range = p98 - p02;
  double* o = raw.data();
  for (std::size_t p = 0; p < lc.valid.size(); ++p) {
    if (!lc.valid[p]) {
      o[p] = 0.0;
    } else if (range < 1e-12) {
      o[p] = 0.5;
    } else {
      double v = (o[p] - p02) / range;
      o[p] = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    }
  }
  return raw;
}

Image colored_shadowfree(const Image& img, double theta_deg) {
  if (!std::isfinite(theta_deg))
    throw InvalidParameter("invariant angle must be finite");
  const LogChromaticity lc = log_chromaticity(img);
  const double t = theta_deg * kPi / 180.0;
  const double ct = std::cos(t), st = std::sin(t);
  // Orthogonal axis; its coordinate carries the illumination component that
  // the transform replaces with a scene-wide constant.
  const double ot = -st, os = ct;

  // Median orthogonal coordinate of the brightest 1% of valid pixels.
  struct Bright {
    double sum;
    std::size_t p;
  };
  std::vector<Bright> bright;
  bright.reserve(static_cast<std::size_t>(lc.valid_count));
  const double* in = img.data();
  for (std::size_t p = 0; p < lc.valid.size(); ++p) {
    if (!lc.valid[p]) continue;
    bright.push_back({in[3 * p] + in[3 * p + 1] + in[3 * p + 2], p});
  }
  const std::size_t k = std::max<std::size_t>(
      1, static_cast<std::size_t>(
             std::llround(0.01 * static_cast<double>(bright.size()))));
  std::partial_sort(bright.begin(), bright.begin() + k, bright.end(),
                    [](const Bright& a, const Bright& b) {
                      if (a.sum != b.sum) return a.sum > b.sum;
                      return a.p < b.p;
                    });
  std::vector<double> ortho(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t p = bright[i].p;
    ortho[i] = lc.u[p] * ot + lc.v[p] * os;
  }
  std::sort(ortho.begin(), ortho.end());
  const double b_med = (k % 2 == 1)
                           ? ortho[k / 2]
                           : 0.5 * (ortho[k / 2 - 1] + ortho[k / 2]);

  Image out(img.height(), img.width(), 3);
  double* o = out.data();
  for (std::size_t p = 0; p < lc.valid.size(); ++p) {
    if (!lc.valid[p]) {
      o[3 * p] = o[3 * p + 1] = o[3 * p + 2] = 1.0 / 3.0;
      continue;
    }
    const double ti = lc.u[p] * ct + lc.v[p] * st;
    const double qu = ti * ct + b_med * ot;
    const double qv = ti * st + b_med * os;
    double rho[3], sum = 0.0;
    for (int c = 0; c < 3; ++c) {
      rho[c] = std::exp(qu * kLogChromaU1[c] + qv * kLogChromaU2[c]);
      sum += rho[c];
    }
    for (int c = 0; c < 3; ++c) o[3 * p + c] = rho[c] / sum;
  }
  return out;
}

}  // namespace iid
