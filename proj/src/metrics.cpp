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

#include "iid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"

namespace iid {

namespace {

double luma_at(const Image& img, int y, int x, LumaMode mode) {
  if (img.channels() == 1) return img.at(y, x, 0);
  if (mode == LumaMode::rec709)
    return 0.2126 * img.at(y, x, 0) + 0.7152 * img.at(y, x, 1) +
           0.0722 * img.at(y, x, 2);
  return (img.at(y, x, 0) + img.at(y, x, 1) + img.at(y, x, 2)) / 3.0;
}

int map_coord(double frac, int dim) {
  const int i = static_cast<int>(std::floor(frac * dim));
  return std::min(std::max(i, 0), dim - 1);
}

// si-MSE of one plane restricted to a window, with its own optimal scale.
double si_mse_window(const std::vector<double>& pred,
                     const std::vector<double>& gt, int plane_w, int y0,
                     int x0, int wh, int ww) {
  double pg = 0.0, pp = 0.0;
  for (int y = y0; y < y0 + wh; ++y)
    for (int x = x0; x < x0 + ww; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * plane_w + x;
      pg += pred[i] * gt[i];
      pp += pred[i] * pred[i];
    }
  const double alpha = pp > 0.0 ? pg / pp : 0.0;
  double acc = 0.0;
  for (int y = y0; y < y0 + wh; ++y)
    for (int x = x0; x < x0 + ww; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * plane_w + x;
      const double d = alpha * pred[i] - gt[i];
      acc += d * d;
    }
  return acc / (static_cast<double>(wh) * ww);
}

std::vector<double> plane_of(const Image& img, int channel, bool lum) {
  const std::size_t n = img.pixels();
  std::vector<double> out(n);
  const double* d = img.data();
  if (img.channels() == 1) {
    std::copy(d, d + n, out.begin());
  } else if (lum) {
    for (std::size_t p = 0; p < n; ++p)
      out[p] = (d[3 * p] + d[3 * p + 1] + d[3 * p + 2]) / 3.0;
  } else {
    for (std::size_t p = 0; p < n; ++p) out[p] = d[3 * p + channel];
  }
  return out;
}

// Half-overlapping window anchors covering [0, dim - win], final window
// flush with the edge.
std::vector<int> window_anchors(int dim, int win) {
  const int stride = std::max(win / 2, 1);
  std::vector<int> anchors;
  for (int a = 0; a + win <= dim; a += stride) anchors.push_back(a);
  if (anchors.empty() || anchors.back() != dim - win)
    anchors.push_back(dim - win);
  return anchors;
}

void check_pair(const Image& pred, const Image& gt, const char* who) {
  if (pred.empty() || gt.empty())
    throw InvalidInput(std::string(who) + ": empty image");
  if (!pred.same_shape(gt))
    throw InvalidInput(std::string(who) + ": shapes differ");
}

}  // namespace

double whdr(const Image& reflectance, const JudgmentSet& js, double delta,
            LumaMode luma) {
  if (reflectance.empty()) throw InvalidInput("whdr: empty image");
  if (!(delta > 0.0)) throw InvalidParameter("whdr: delta must be > 0");
  if (js.judgments.empty())
    throw DegenerateInput("whdr: empty judgment set");
  const int h = reflectance.height(), w = reflectance.width();
  double total = 0.0, wrong = 0.0;
  for (const Judgment& j : js.judgments) {
    if (j.darker != '1' && j.darker != '2' && j.darker != 'E')
      throw InvalidInput("whdr: judgment label must be '1', '2', or 'E'");
    if (!(j.weight >= 0.0) || !std::isfinite(j.weight))
      throw InvalidInput("whdr: judgment weight must be finite and >= 0");
    for (double f : {j.y1, j.x1, j.y2, j.x2})
      if (!(f >= 0.0 && f <= 1.0))
        throw InvalidInput("whdr: point coordinates must lie in [0, 1]");
    total += j.weight;
    const double l1 =
        luma_at(reflectance, map_coord(j.y1, h), map_coord(j.x1, w), luma);
    const double l2 =
        luma_at(reflectance, map_coord(j.y2, h), map_coord(j.x2, w), luma);
    char pred;
    if (l1 <= 0.0 || l2 <= 0.0) {
      pred = '?';  // no ratio: always a disagreement
    } else if (l2 / l1 > 1.0 + delta) {
      pred = '1';
    } else if (l1 / l2 > 1.0 + delta) {
      pred = '2';
    } else {
      pred = 'E';
    }
    if (pred != j.darker) wrong += j.weight;
  }
  if (total <= 0.0)
    throw DegenerateInput("whdr: judgment weights sum to zero");
  return wrong / total;
}

double si_mse(const Image& pred, const Image& gt, SiMode mode) {
  check_pair(pred, gt, "si_mse");
  const int h = pred.height(), w = pred.width();
  if (mode == SiMode::per_channel && pred.channels() == 3) {
    double acc = 0.0;
    for (int c = 0; c < 3; ++c)
      acc += si_mse_window(plane_of(pred, c, false), plane_of(gt, c, false),
                           w, 0, 0, h, w);
    return acc / 3.0;
  }
  return si_mse_window(plane_of(pred, 0, true), plane_of(gt, 0, true), w, 0,
                       0, h, w);
}

double si_lmse(const Image& pred, const Image& gt, double window_frac,
               SiMode mode) {
  check_pair(pred, gt, "si_lmse");
  if (!(window_frac > 0.0 && window_frac <= 1.0))
    throw InvalidParameter("si_lmse: window fraction must lie in (0, 1]");
  const int h = pred.height(), w = pred.width();
  if (h < 2 || w < 2)
    throw InvalidInput("si_lmse needs at least a 2x2 image");
  const int win = std::max(
      static_cast<int>(std::lround(window_frac * std::max(h, w))), 2);
  const int wh = std::min(win, h), ww = std::min(win, w);
  const auto ys = window_anchors(h, wh);
  const auto xs = window_anchors(w, ww);

  const auto over_plane = [&](const std::vector<double>& p,
                              const std::vector<double>& g) {
    double acc = 0.0;
    for (int y0 : ys)
      for (int x0 : xs) acc += si_mse_window(p, g, w, y0, x0, wh, ww);
    return acc / (static_cast<double>(ys.size()) * xs.size());
  };
  if (mode == SiMode::per_channel && pred.channels() == 3) {
    double acc = 0.0;
    for (int c = 0; c < 3; ++c)
      acc += over_plane(plane_of(pred, c, false), plane_of(gt, c, false));
    return acc / 3.0;
  }
  return over_plane(plane_of(pred, 0, true), plane_of(gt, 0, true));
}

JudgmentSet load_judgments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception&) {
    throw IoError("malformed judgments JSON in '" + path + "'");
  }
  if (!j.is_array())
    throw IoError("judgments file '" + path + "' must be a JSON array");
  JudgmentSet js;
  for (const auto& e : j) {
    try {
      Judgment jd;
      const auto& p1 = e.at("p1");
      const auto& p2 = e.at("p2");
      if (!p1.is_array() || p1.size() != 2 || !p2.is_array() || p2.size() != 2)
        throw IoError("judgment points must be [y, x] pairs in '" + path +
                      "'");
      jd.y1 = p1[0].get<double>();
      jd.x1 = p1[1].get<double>();
      jd.y2 = p2[0].get<double>();
      jd.x2 = p2[1].get<double>();
      const std::string darker = e.at("darker").get<std::string>();
      if (darker != "1" && darker != "2" && darker != "E")
        throw IoError("judgment label must be \"1\", \"2\", or \"E\" in '" +
                      path + "'");
      jd.darker = darker[0];
      jd.weight = e.value("weight", 1.0);
      for (double f : {jd.y1, jd.x1, jd.y2, jd.x2})
        if (!(f >= 0.0 && f <= 1.0))
          throw IoError("judgment coordinates must lie in [0, 1] in '" +
                        path + "'");
      if (!(jd.weight >= 0.0) || !std::isfinite(jd.weight))
        throw IoError("judgment weight must be finite and >= 0 in '" + path +
                      "'");
      js.judgments.push_back(jd);
    } catch (const nlohmann::json::exception&) {
      throw IoError("malformed judgment record in '" + path + "'");
    }
  }
  return js;
}

}  // namespace iid
