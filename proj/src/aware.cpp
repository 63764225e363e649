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

#include "iid/aware.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace iid {

namespace {

void check_stack(const FeatureStack& f, const char* who) {
  if (f.count < 1 || f.height < 1 || f.width < 1 ||
      f.v.size() != static_cast<std::size_t>(f.count) * f.height * f.width)
    throw InvalidInput(std::string(who) + ": malformed feature stack");
  for (double d : f.v)
    if (!std::isfinite(d))
      throw InvalidInput(std::string(who) + ": non-finite feature value");
}

// mean/variance (population) over v[lo, hi).
void moments(const std::vector<double>& v, std::size_t lo, std::size_t hi,
             double* mean, double* var) {
  const double n = static_cast<double>(hi - lo);
  double m = 0.0;
  for (std::size_t i = lo; i < hi; ++i) m += v[i];
  m /= n;
  double s = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    const double d = v[i] - m;
    s += d * d;
  }
  *mean = m;
  *var = s / n;
}

}  // namespace

FeatureStack::FeatureStack(int m, int h, int w, double fill)
    : count(m), height(h), width(w) {
  if (m < 1 || h < 1 || w < 1)
    throw InvalidInput("feature stack dimensions must be positive");
  v.assign(static_cast<std::size_t>(m) * h * w, fill);
}

double& FeatureStack::at(int i, int y, int x) {
  if (i < 0 || i >= count || y < 0 || y >= height || x < 0 || x >= width)
    throw InvalidInput("feature stack access out of range");
  return v[idx(i, y, x)];
}

double FeatureStack::at(int i, int y, int x) const {
  if (i < 0 || i >= count || y < 0 || y >= height || x < 0 || x >= width)
    throw InvalidInput("feature stack access out of range");
  return v[idx(i, y, x)];
}

PixelField cam_attention(const FeatureStack& f, const ClassifierWeights& cw) {
  check_stack(f, "cam_attention");
  if (cw.w.size() != static_cast<std::size_t>(f.count))
    throw InvalidInput("cam_attention: weight count " +
                       std::to_string(cw.w.size()) + " != map count " +
                       std::to_string(f.count));
  PixelField out(f.height, f.width, 1);
  const double inv_m = 1.0 / static_cast<double>(f.count);
  for (int i = 0; i < f.count; ++i) {
    const double wi = cw.w[i];
    const double* map = f.v.data() + f.idx(i, 0, 0);
    for (std::size_t p = 0; p < out.size(); ++p) out.v[p] += wi * map[p];
  }
  for (double& d : out.v) d *= inv_m;
  return out;
}

Image cam_attention_heat(const FeatureStack& f, const ClassifierWeights& cw) {
  const PixelField raw = cam_attention(f, cw);
  const auto [mn, mx] = std::minmax_element(raw.v.begin(), raw.v.end());
  Image out(raw.height, raw.width, 1);
  const double range = *mx - *mn;
  for (std::size_t p = 0; p < raw.size(); ++p)
    out.data()[p] = range < 1e-12 ? 0.5 : (raw.v[p] - *mn) / range;
  return out;
}

FeatureStack instance_norm(const FeatureStack& f) {
  check_stack(f, "instance_norm");
  FeatureStack out = f;
  const std::size_t plane = static_cast<std::size_t>(f.height) * f.width;
  for (int i = 0; i < f.count; ++i) {
    double mean, var;
    moments(f.v, i * plane, (i + 1) * plane, &mean, &var);
    const double inv = 1.0 / std::sqrt(var + kEpsNorm);
    for (std::size_t p = i * plane; p < (i + 1) * plane; ++p)
      out.v[p] = (f.v[p] - mean) * inv;
  }
  return out;
}

FeatureStack layer_norm(const FeatureStack& f) {
  check_stack(f, "layer_norm");
  FeatureStack out = f;
  double mean, var;
  moments(f.v, 0, f.v.size(), &mean, &var);
  const double inv = 1.0 / std::sqrt(var + kEpsNorm);
  for (std::size_t p = 0; p < f.v.size(); ++p) out.v[p] = (f.v[p] - mean) * inv;
  return out;
}

FeatureStack lin_norm(const FeatureStack& f, const std::vector<double>& gamma,
                      const std::vector<double>& beta, double nu) {
  check_stack(f, "lin_norm");
  if (!(nu >= 0.0 && nu <= 1.0))
    throw InvalidParameter("lin_norm: nu must lie in [0, 1]");
  if (gamma.size() != static_cast<std::size_t>(f.count) ||
      beta.size() != static_cast<std::size_t>(f.count))
    throw InvalidInput("lin_norm: gamma/beta must have one entry per map");
  const FeatureStack in = instance_norm(f);
  const FeatureStack ln = layer_norm(f);
  FeatureStack out = f;
  const std::size_t plane = static_cast<std::size_t>(f.height) * f.width;
  for (int i = 0; i < f.count; ++i)
    for (std::size_t p = i * plane; p < (i + 1) * plane; ++p)
      out.v[p] =
          gamma[i] * ((1.0 - nu) * in.v[p] + nu * ln.v[p]) + beta[i];
  return out;
}

namespace {

constexpr char kMagic[4] = {'F', 'S', 'T', 'K'};

}  // namespace

FeatureStack load_feature_stack(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw IoError("'" + path + "' is not a feature stack (bad magic)");
  std::uint8_t lenb[4];
  in.read(reinterpret_cast<char*>(lenb), 4);
  if (!in) throw IoError("truncated feature stack header in '" + path + "'");
  const std::uint32_t hlen = static_cast<std::uint32_t>(lenb[0]) |
                             (static_cast<std::uint32_t>(lenb[1]) << 8) |
                             (static_cast<std::uint32_t>(lenb[2]) << 16) |
                             (static_cast<std::uint32_t>(lenb[3]) << 24);
  if (hlen == 0 || hlen > 1 << 20)
    throw IoError("implausible feature stack header size in '" + path + "'");
  std::string header(hlen, '\0');
  in.read(header.data(), hlen);
  if (!in) throw IoError("truncated feature stack header in '" + path + "'");

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception&) {
    throw IoError("malformed feature stack header JSON in '" + path + "'");
  }
  try {
    if (j.at("dtype") != "f32" || j.at("layout") != "map-major" ||
        j.at("endian") != "little")
      throw IoError("unsupported feature stack encoding in '" + path + "'");
    const int m = j.at("m").get<int>();
    const int h = j.at("height").get<int>();
    const int w = j.at("width").get<int>();
    if (m < 1 || h < 1 || w < 1)
      throw IoError("bad feature stack dimensions in '" + path + "'");

    FeatureStack f(m, h, w);
    std::vector<std::uint8_t> raw(f.size() * 4);
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
      throw IoError("truncated feature stack payload in '" + path + "'");
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::uint32_t bits = static_cast<std::uint32_t>(raw[4 * i]) |
                                 (static_cast<std::uint32_t>(raw[4 * i + 1]) << 8) |
                                 (static_cast<std::uint32_t>(raw[4 * i + 2]) << 16) |
                                 (static_cast<std::uint32_t>(raw[4 * i + 3]) << 24);
      float val;
      std::memcpy(&val, &bits, 4);
      if (!std::isfinite(val))
        throw IoError("non-finite feature value in '" + path + "'");
      f.v[i] = static_cast<double>(val);
    }
    return f;
  } catch (const nlohmann::json::exception&) {
    throw IoError("incomplete feature stack header in '" + path + "'");
  }
}

void save_feature_stack(const FeatureStack& f, const std::string& path) {
  check_stack(f, "save_feature_stack");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  const nlohmann::json j{{"m", f.count},       {"height", f.height},
                         {"width", f.width},   {"dtype", "f32"},
                         {"layout", "map-major"}, {"endian", "little"}};
  const std::string header = j.dump();
  out.write(kMagic, 4);
  const std::uint32_t hlen = static_cast<std::uint32_t>(header.size());
  const std::uint8_t lenb[4] = {
      static_cast<std::uint8_t>(hlen & 0xff),
      static_cast<std::uint8_t>((hlen >> 8) & 0xff),
      static_cast<std::uint8_t>((hlen >> 16) & 0xff),
      static_cast<std::uint8_t>((hlen >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(lenb), 4);
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  for (double d : f.v) {
    const float val = static_cast<float>(d);
    std::uint32_t bits;
    std::memcpy(&bits, &val, 4);
    const std::uint8_t b[4] = {static_cast<std::uint8_t>(bits & 0xff),
                               static_cast<std::uint8_t>((bits >> 8) & 0xff),
                               static_cast<std::uint8_t>((bits >> 16) & 0xff),
                               static_cast<std::uint8_t>((bits >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
  }
  if (!out) throw IoError("failed to write feature stack '" + path + "'");
}

ClassifierWeights load_classifier_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception&) {
    throw IoError("malformed classifier weights JSON in '" + path + "'");
  }
  if (!j.is_object() || !j.contains("weights") || !j["weights"].is_array())
    throw IoError("classifier weights file '" + path +
                  "' must be {\"weights\": [...]}");
  ClassifierWeights cw;
  for (const auto& e : j["weights"]) {
    if (!e.is_number())
      throw IoError("non-numeric classifier weight in '" + path + "'");
    cw.w.push_back(e.get<double>());
  }
  if (cw.w.empty())
    throw IoError("classifier weights file '" + path + "' is empty");
  return cw;
}

Image render_heatmap(const PixelField& map) {
  if (map.channels != 1 || map.v.empty())
    throw InvalidInput("render_heatmap expects a non-empty 1-channel field");
  // Dark -> purple -> red -> orange -> pale yellow anchors, interpolated.
  static constexpr double kAnchors[5][3] = {{0.001, 0.000, 0.014},
                                            {0.283, 0.041, 0.418},
                                            {0.729, 0.212, 0.333},
                                            {0.978, 0.598, 0.152},
                                            {0.988, 0.998, 0.645}};
  const auto [mn, mx] = std::minmax_element(map.v.begin(), map.v.end());
  const double range = *mx - *mn;
  Image out(map.height, map.width, 3);
  for (std::size_t p = 0; p < map.v.size(); ++p) {
    const double t = range < 1e-12 ? 0.5 : (map.v[p] - *mn) / range;
    const double pos = t * 4.0;
    const int seg = std::min(3, static_cast<int>(pos));
    const double frac = pos - seg;
    for (int c = 0; c < 3; ++c)
      out.data()[3 * p + c] =
          kAnchors[seg][c] * (1.0 - frac) + kAnchors[seg + 1][c] * frac;
  }
  return out;
}

}  // namespace iid
