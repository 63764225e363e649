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

#include "iid/solver.hpp"

#include <algorithm>
#include <cmath>

#include "iid/rng.hpp"
#include "iid/shadowfree.hpp"

namespace iid {

namespace {

// Log-domain bounds: layers stay inside [1e-8, 1e6] so exp never overflows
// and outputs are strictly positive.
const double kLogFloor = std::log(1e-8);
const double kLogCeil = std::log(1e6);
constexpr double kInitFloor = 1e-4;

void check_config(const SolverConfig& cfg) {
  if (cfg.max_iters < 0) throw InvalidParameter("max_iters must be >= 0");
  if (!(cfg.step_size > 0.0)) throw InvalidParameter("step_size must be > 0");
  if (!(cfg.step_decay > 0.0 && cfg.step_decay <= 1.0))
    throw InvalidParameter("step_decay must lie in (0, 1]");
  if (cfg.plateau_iters < 1 || cfg.converge_window < 1)
    throw InvalidParameter("plateau/convergence windows must be >= 1");
  if (!(cfg.converge_rel > 0.0))
    throw InvalidParameter("converge_rel must be > 0");
  if (cfg.max_backtracks < 0)
    throw InvalidParameter("max_backtracks must be >= 0");
  if (cfg.theta_deg && !std::isfinite(*cfg.theta_deg))
    throw InvalidParameter("theta override must be finite");
}

Image exp_image(const std::vector<double>& logv, int h, int w, int c) {
  Image img(h, w, c);
  double* o = img.data();
  for (std::size_t i = 0; i < logv.size(); ++i) o[i] = std::exp(logv[i]);
  return img;
}

}  // namespace

PreparedPriors prepare_priors(const Image& I, std::optional<double> theta_deg,
                              double lambda) {
  if (I.channels() != 3)
    throw InvalidInput("prepare_priors requires a 3-channel image");
  double theta;
  if (theta_deg) {
    if (!std::isfinite(*theta_deg))
      throw InvalidParameter("theta override must be finite");
    theta = *theta_deg;
  } else {
    theta = min_entropy_angle(entropy_profile(log_chromaticity(I)));
  }
  PreparedPriors pp;
  pp.theta_deg = theta;
  pp.priors.rho_sf = colored_shadowfree(I, theta);
  pp.priors.zeta_hf = specular_free(I, lambda);
  pp.priors.lambda = lambda;
  return pp;
}

DecompositionResult decompose(const Image& I, const LossWeights& weights,
                              const SolverConfig& config) {
  if (I.channels() != 3) throw InvalidInput("decompose requires 3 channels");
  check_config(config);
  const int h = I.height(), w = I.width();
  const std::size_t np = I.pixels();

  const Image lum = luminance(I);
  double gmean = 0.0;
  for (std::size_t p = 0; p < np; ++p) gmean += lum.data()[p];
  gmean /= static_cast<double>(np);
  if (gmean < kEpsBlack)
    throw DegenerateInput("decompose: image is effectively black");

  const PreparedPriors pp = prepare_priors(I, config.theta_deg, config.lambda);

  // Optimize log layers; positivity of the output is structural.
  std::vector<double> r(np * 3), s(np);
  const auto clamp_log = [](double v) {
    return std::clamp(v, kLogFloor, kLogCeil);
  };
  if (config.init == SolverConfig::Init::from_input) {
    // Flat-luminance reflectance carrying the input's colors, shading the
    // luminance residue.
    for (std::size_t p = 0; p < np; ++p) {
      const double m = std::max(lum.data()[p], kEpsBlack);
      for (int c = 0; c < 3; ++c)
        r[3 * p + c] = clamp_log(std::log(
            std::max(I.data()[3 * p + c] / m * gmean, kInitFloor)));
      s[p] = clamp_log(std::log(std::max(m / gmean, kInitFloor)));
    }
  } else {
    // Colors from the shadow-free chromaticity prior at the input's global
    // scale; shading makes the luminances meet the input.
    for (std::size_t p = 0; p < np; ++p) {
      double rmean = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double v =
            std::max(3.0 * gmean * pp.priors.rho_sf.data()[3 * p + c],
                     kInitFloor);
        r[3 * p + c] = clamp_log(std::log(v));
        rmean += v;
      }
      rmean /= 3.0;
      s[p] = clamp_log(
          std::log(std::max(lum.data()[p] / rmean, kInitFloor)));
    }
  }

  Image R = exp_image(r, h, w, 3);
  Image S = exp_image(s, h, w, 1);
  Stage1Result cur = total_stage1(R, S, pp.priors, I, weights, true);

  DecompositionResult res;
  res.theta_deg = pp.theta_deg;
  res.trace.push_back(cur.terms.total);

  double alpha = config.step_size;
  int since_plateau_check = 0;
  std::vector<double> r_new(r.size()), s_new(s.size());
  for (int it = 0; it < config.max_iters; ++it) {
    // Chain rule into the log domain: dF/d log X = dF/dX * X.
    std::vector<double> gr(r.size()), gs(s.size());
    for (std::size_t i = 0; i < r.size(); ++i)
      gr[i] = cur.grad_r.v[i] * R.data()[i];
    for (std::size_t i = 0; i < s.size(); ++i)
      gs[i] = cur.grad_s.v[i] * S.data()[i];

    // Backtracking on the true (re-frozen) objective keeps the accepted
    // trace strictly decreasing even though the search direction was taken
    // at frozen factors.
    bool accepted = false;
    double a = alpha;
    Image R_cand, S_cand;
    double f_cand = 0.0;
    for (int bt = 0; bt <= config.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < r.size(); ++i)
        r_new[i] = clamp_log(r[i] - a * gr[i]);
      for (std::size_t i = 0; i < s.size(); ++i)
        s_new[i] = clamp_log(s[i] - a * gs[i]);
      R_cand = exp_image(r_new, h, w, 3);
      S_cand = exp_image(s_new, h, w, 1);
      f_cand = total_stage1(R_cand, S_cand, pp.priors, I, weights, false)
                   .terms.total;
      if (f_cand < res.trace.back()) {
        accepted = true;
        break;
      }
      a *= 0.5;
    }
    if (!accepted) {
      // No descent direction at the smallest step: a local minimum at this
      // resolution.
      res.converged = true;
      break;
    }
    r.swap(r_new);
    s.swap(s_new);
    R = std::move(R_cand);
    S = std::move(S_cand);
    cur = total_stage1(R, S, pp.priors, I, weights, true);
    res.trace.push_back(f_cand);
    alpha = (a == alpha) ? std::min(alpha * 1.2, config.step_size * 10.0) : a;

    const auto rel_drop = [&](int span) {
      const std::size_t t = res.trace.size() - 1;
      const double prev = res.trace[t - span];
      return (prev - res.trace[t]) / std::max(std::fabs(prev), 1e-300);
    };
    if (++since_plateau_check >= config.plateau_iters) {
      if (rel_drop(config.plateau_iters) < config.converge_rel)
        alpha *= config.step_decay;
      since_plateau_check = 0;
    }
    if (static_cast<int>(res.trace.size()) > config.converge_window &&
        rel_drop(config.converge_window) < config.converge_rel) {
      res.converged = true;
      break;
    }
  }

  res.iterations = static_cast<int>(res.trace.size()) - 1;
  res.reflectance = std::move(R);
  res.shading = std::move(S);
  res.final_terms = cur.terms;
  res.reconstruction_residual = cur.terms.rec;
  return res;
}

double grad_check(const Objective& f, const Image& R, const Image& S,
                  const PixelField& grad_r, const PixelField& grad_s,
                  double h, double subsample, std::uint64_t seed) {
  if (!(h > 0.0)) throw InvalidParameter("grad_check: h must be > 0");
  if (!(subsample > 0.0 && subsample <= 1.0))
    throw InvalidParameter("grad_check: subsample must lie in (0, 1]");
  if (grad_r.size() != R.size() || grad_s.size() != S.size())
    throw InvalidInput("grad_check: gradient shapes do not match images");

  Rng rng(seed);
  double max_rel = 0.0;
  bool probed = false;
  const auto probe = [&](const Image& img, const Image& other, bool first,
                         std::size_t i, double analytic) {
    std::vector<double> vals(img.values());
    vals[i] += h;
    const Image plus =
        Image::from_data(img.height(), img.width(), img.channels(), vals);
    vals[i] -= 2.0 * h;
    const Image minus =
        Image::from_data(img.height(), img.width(), img.channels(), vals);
    const double fd = first ? (f(plus, other) - f(minus, other)) / (2.0 * h)
                            : (f(other, plus) - f(other, minus)) / (2.0 * h);
    const double denom = std::max(std::fabs(fd), std::fabs(analytic));
    if (denom < 1e-12) return;
    max_rel = std::max(max_rel, std::fabs(fd - analytic) / denom);
  };
  for (std::size_t i = 0; i < R.size(); ++i)
    if (rng.uniform() < subsample) {
      probe(R, S, true, i, grad_r.v[i]);
      probed = true;
    }
  for (std::size_t i = 0; i < S.size(); ++i)
    if (rng.uniform() < subsample) {
      probe(S, R, false, i, grad_s.v[i]);
      probed = true;
    }
  if (!probed) {
    probe(R, S, true, 0, grad_r.v[0]);
    probe(S, R, false, 0, grad_s.v[0]);
  }
  return max_rel;
}

}  // namespace iid
