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

#include "iid/losses.hpp"

#include <algorithm>
#include <cmath>

namespace iid {

namespace {

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

void require_3ch(const Image& img, const char* who) {
  if (img.channels() != 3)
    throw InvalidInput(std::string(who) + ": expected a 3-channel image");
}

void require_same(const Image& a, const Image& b, const char* who) {
  if (!a.same_shape(b))
    throw InvalidInput(std::string(who) + ": image shapes differ");
}

void require_nonempty(const Image& img, const char* who) {
  if (img.empty()) throw InvalidInput(std::string(who) + ": empty image");
}

// --- per-pixel L1 terms ---------------------------------------------------

double sf_eval(const Image& R, const Image& rho, PixelField* grad) {
  const double* r = R.data();
  const double* t = rho.data();
  const std::size_t n = R.pixels();
  const double inv_n = 1.0 / static_cast<double>(R.size());
  double value = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double sum = r[3 * p] + r[3 * p + 1] + r[3 * p + 2];
    if (sum < kEpsBlack) {
      // Black pixels sit at the achromatic point with zero gradient.
      for (int c = 0; c < 3; ++c) value += std::fabs(1.0 / 3.0 - t[3 * p + c]);
      continue;
    }
    double s[3], inner = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double sigma = r[3 * p + c] / sum;
      const double diff = sigma - t[3 * p + c];
      value += std::fabs(diff);
      s[c] = sgn(diff);
      inner += s[c] * sigma;
    }
    if (grad) {
      // d sigma_c / d R_k = (1[c==k] - sigma_c) / sum.
      for (int k = 0; k < 3; ++k)
        grad->v[3 * p + k] += (s[k] - inner) / sum * inv_n;
    }
  }
  return value * inv_n;
}

double hf_eval(const Image& R, const Image& zeta, double lambda,
               PixelField* grad) {
  const double* r = R.data();
  const double* t = zeta.data();
  const std::size_t n = R.pixels();
  const double inv_n = 1.0 / static_cast<double>(R.size());
  const double denom = 1.0 - 3.0 * lambda;
  double value = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    int mx = 0;
    for (int c = 1; c < 3; ++c)
      if (r[3 * p + c] > r[3 * p + mx]) mx = c;
    const double sum = r[3 * p] + r[3 * p + 1] + r[3 * p + 2];
    const double m = (r[3 * p + mx] - lambda * sum) / denom;
    double s[3], srod = 0.0;
    for (int c = 0; c < 3; ++c) {
      const double delta = r[3 * p + c] - m;
      const double val = delta > 0.0 ? delta : 0.0;
      const double diff = val - t[3 * p + c];
      value += std::fabs(diff);
      // Clamped channels carry no gradient.
      s[c] = delta > 0.0 ? sgn(diff) : 0.0;
      srod += s[c];
    }
    if (grad) {
      for (int k = 0; k < 3; ++k) {
        const double dm = ((k == mx ? 1.0 : 0.0) - lambda) / denom;
        grad->v[3 * p + k] += (s[k] - srod * dm) * inv_n;
      }
    }
  }
  return value * inv_n;
}

double diffuse_eval(const Image& R, const Image& S, const Image& target,
                    PixelField* grad_r, PixelField* grad_s) {
  const double* r = R.data();
  const double* s = S.data();
  const double* t = target.data();
  const std::size_t n = R.pixels();
  const double inv_n = 1.0 / static_cast<double>(R.size());
  double value = 0.0;
  for (std::size_t p = 0; p < n; ++p) {
    const double sv = s[p];
    for (int c = 0; c < 3; ++c) {
      const double diff = r[3 * p + c] * sv - t[3 * p + c];
      value += std::fabs(diff);
      const double sg = sgn(diff);
      if (grad_r) grad_r->v[3 * p + c] += sg * sv * inv_n;
      if (grad_s) grad_s->v[p] += sg * r[3 * p + c] * inv_n;
    }
  }
  return value * inv_n;
}

// --- gradient-domain terms ------------------------------------------------

double smooth_eval(const Image& S, PixelField* grad) {
  const GradientField g = gradient(S);
  const double inv_m = 1.0 / static_cast<double>(2 * S.size());
  double value = 0.0;
  for (double d : g.dx.v) value += std::fabs(d);
  for (double d : g.dy.v) value += std::fabs(d);
  if (grad) {
    PixelField cx(g.dx.height, g.dx.width, g.dx.channels);
    PixelField cy = cx;
    for (std::size_t i = 0; i < cx.size(); ++i) {
      cx.v[i] = sgn(g.dx.v[i]) * inv_m;
      cy.v[i] = sgn(g.dy.v[i]) * inv_m;
    }
    PixelField adj = gradient_adjoint(cx, cy);
    for (std::size_t i = 0; i < adj.size(); ++i) grad->v[i] += adj.v[i];
  }
  return value * inv_m;
}

double sparse_eval(const Image& R, const SparseWeights& w, PixelField* grad) {
  const GradientField g = gradient(R);
  if (!g.dx.same_shape(w.wx) || !g.dy.same_shape(w.wy))
    throw InvalidInput("loss_reflectance_sparse: weight shape mismatch");
  const double inv_m = 1.0 / static_cast<double>(2 * R.size());
  double value = 0.0;
  for (std::size_t i = 0; i < g.dx.size(); ++i)
    value += w.wx.v[i] * std::fabs(g.dx.v[i]) +
             w.wy.v[i] * std::fabs(g.dy.v[i]);
  if (grad) {
    PixelField cx(g.dx.height, g.dx.width, g.dx.channels);
    PixelField cy = cx;
    for (std::size_t i = 0; i < cx.size(); ++i) {
      cx.v[i] = w.wx.v[i] * sgn(g.dx.v[i]) * inv_m;
      cy.v[i] = w.wy.v[i] * sgn(g.dy.v[i]) * inv_m;
    }
    PixelField adj = gradient_adjoint(cx, cy);
    for (std::size_t i = 0; i < adj.size(); ++i) grad->v[i] += adj.v[i];
  }
  return value * inv_m;
}

double frob(const GradientField& g) {
  double acc = 0.0;
  for (double d : g.dx.v) acc += d * d;
  for (double d : g.dy.v) acc += d * d;
  return std::sqrt(acc);
}

void check_gradsep_shapes(const Image& R, const Image& S) {
  require_nonempty(R, "loss_gradient_separation");
  require_nonempty(S, "loss_gradient_separation");
  if (R.height() != S.height() || R.width() != S.width())
    throw InvalidInput("loss_gradient_separation: spatial shapes differ");
  if (S.channels() != 1 && S.channels() != R.channels())
    throw InvalidInput(
        "loss_gradient_separation: S must have 1 channel or match R");
}

double gradsep_eval(const Image& R, const Image& S, const GradSepFactors& f,
                    PixelField* grad_r, PixelField* grad_s) {
  check_gradsep_shapes(R, S);
  double total = 0.0;
  for (int level = 1; level <= 3; ++level) {
    if (!f.active[level - 1]) continue;
    const double lr = f.lambda_r[level - 1];
    const double ls = f.lambda_s[level - 1];
    const Image Rn = downsample(R, level);
    const Image Sn = downsample(S, level);
    const GradientField gr = gradient(Rn);
    const GradientField gs = gradient(Sn);
    const int hh = gr.dx.height, ww = gr.dx.width;
    const int cr = gr.dx.channels, cs = gs.dx.channels;

    // tanh-compressed magnitudes; S broadcasts across R's channels.
    const auto squash = [](const PixelField& src, double lam) {
      PixelField out = src;
      for (double& d : out.v) d = std::tanh(lam * std::fabs(d));
      return out;
    };
    const PixelField trx = squash(gr.dx, lr), tr_y = squash(gr.dy, lr);
    const PixelField tsx = squash(gs.dx, ls), tsy = squash(gs.dy, ls);

    double sumsq = 0.0;
    for (int y = 0; y < hh; ++y)
      for (int x = 0; x < ww; ++x)
        for (int c = 0; c < cr; ++c) {
          const std::size_t ir = trx.idx(y, x, c);
          const std::size_t is = tsx.idx(y, x, cs == 1 ? 0 : c);
          const double px = trx.v[ir] * tsx.v[is];
          const double py = tr_y.v[ir] * tsy.v[is];
          sumsq += px * px + py * py;
        }
    const double norm = std::sqrt(sumsq);
    total += norm;
    if (!(grad_r || grad_s) || norm < kEpsGrad) continue;

    PixelField crx(hh, ww, cr), cry(hh, ww, cr);
    PixelField csx(hh, ww, cs), csy(hh, ww, cs);
    for (int y = 0; y < hh; ++y)
      for (int x = 0; x < ww; ++x)
        for (int c = 0; c < cr; ++c) {
          const std::size_t ir = trx.idx(y, x, c);
          const std::size_t is = tsx.idx(y, x, cs == 1 ? 0 : c);
          const double px = trx.v[ir] * tsx.v[is];
          const double py = tr_y.v[ir] * tsy.v[is];
          // d norm / d tanh-term, then through tanh and |.|.
          crx.v[ir] += (px / norm) * tsx.v[is] * (1.0 - trx.v[ir] * trx.v[ir]) *
                       lr * sgn(gr.dx.v[ir]);
          cry.v[ir] += (py / norm) * tsy.v[is] *
                       (1.0 - tr_y.v[ir] * tr_y.v[ir]) * lr *
                       sgn(gr.dy.v[ir]);
          csx.v[is] += (px / norm) * trx.v[ir] * (1.0 - tsx.v[is] * tsx.v[is]) *
                       ls * sgn(gs.dx.v[is]);
          csy.v[is] += (py / norm) * tr_y.v[ir] *
                       (1.0 - tsy.v[is] * tsy.v[is]) * ls *
                       sgn(gs.dy.v[is]);
        }
    if (grad_r) {
      const PixelField fine = downsample_adjoint(
          gradient_adjoint(crx, cry), R.height(), R.width(), level);
      for (std::size_t i = 0; i < fine.size(); ++i) grad_r->v[i] += fine.v[i];
    }
    if (grad_s) {
      const PixelField fine = downsample_adjoint(
          gradient_adjoint(csx, csy), S.height(), S.width(), level);
      for (std::size_t i = 0; i < fine.size(); ++i) grad_s->v[i] += fine.v[i];
    }
  }
  return total;
}

}  // namespace

LossValue loss_shadow_free(const Image& R, const Image& rho_sf) {
  require_3ch(R, "loss_shadow_free");
  require_3ch(rho_sf, "loss_shadow_free");
  require_same(R, rho_sf, "loss_shadow_free");
  LossValue out;
  out.grad_r = PixelField(R.height(), R.width(), 3);
  out.value = sf_eval(R, rho_sf, &out.grad_r);
  return out;
}

LossValue loss_specular_free(const Image& R, const Image& zeta_hf,
                             double lambda) {
  require_3ch(R, "loss_specular_free");
  require_3ch(zeta_hf, "loss_specular_free");
  require_same(R, zeta_hf, "loss_specular_free");
  if (!(lambda > 1.0 / 3.0 && lambda <= 1.0))
    throw InvalidParameter(
        "specular-free target chromaticity must lie in (1/3, 1]");
  LossValue out;
  out.grad_r = PixelField(R.height(), R.width(), 3);
  out.value = hf_eval(R, zeta_hf, lambda, &out.grad_r);
  return out;
}

GradSepFactors gradsep_factors(const Image& R, const Image& S) {
  check_gradsep_shapes(R, S);
  GradSepFactors f;
  for (int level = 1; level <= 3; ++level) {
    const double nr = frob(gradient(downsample(R, level)));
    const double ns = frob(gradient(downsample(S, level)));
    if (nr < kEpsGrad || ns < kEpsGrad) {
      f.active[level - 1] = false;
      continue;
    }
    f.active[level - 1] = true;
    f.lambda_r[level - 1] = std::sqrt(ns / nr);
    f.lambda_s[level - 1] = std::sqrt(nr / ns);
  }
  return f;
}

LossValue loss_gradient_separation(const Image& R, const Image& S) {
  return loss_gradient_separation(R, S, gradsep_factors(R, S));
}

LossValue loss_gradient_separation(const Image& R, const Image& S,
                                   const GradSepFactors& factors) {
  LossValue out;
  out.grad_r = PixelField(R.height(), R.width(), R.channels());
  out.grad_s = PixelField(S.height(), S.width(), S.channels());
  out.value = gradsep_eval(R, S, factors, &out.grad_r, &out.grad_s);
  return out;
}

LossValue loss_shading_smooth(const Image& S) {
  require_nonempty(S, "loss_shading_smooth");
  LossValue out;
  out.grad_r = PixelField(S.height(), S.width(), S.channels());
  out.value = smooth_eval(S, &out.grad_r);
  return out;
}

SparseWeights sparse_weights(const Image& R) {
  require_nonempty(R, "sparse_weights");
  const GradientField g = gradient(R);
  SparseWeights w;
  w.wx = PixelField(g.dx.height, g.dx.width, g.dx.channels);
  w.wy = w.wx;
  for (std::size_t i = 0; i < w.wx.size(); ++i) {
    w.wx.v[i] =
        1.0 / (std::pow(std::fabs(g.dx.v[i]), 1.0 - kSparsityP) + kEpsSparse);
    w.wy.v[i] =
        1.0 / (std::pow(std::fabs(g.dy.v[i]), 1.0 - kSparsityP) + kEpsSparse);
  }
  return w;
}

LossValue loss_reflectance_sparse(const Image& R) {
  return loss_reflectance_sparse(R, sparse_weights(R));
}

LossValue loss_reflectance_sparse(const Image& R, const SparseWeights& w) {
  require_nonempty(R, "loss_reflectance_sparse");
  LossValue out;
  out.grad_r = PixelField(R.height(), R.width(), R.channels());
  out.value = sparse_eval(R, w, &out.grad_r);
  return out;
}

double loss_classification(const std::vector<double>& prob_input,
                           const std::vector<double>& prob_reflectance) {
  if (prob_input.empty() || prob_reflectance.empty())
    throw InvalidInput("loss_classification: empty probability vector");
  const auto checked = [](double p) {
    if (!(p >= 0.0 && p <= 1.0))
      throw InvalidInput("loss_classification: probability outside [0, 1]");
    return std::clamp(p, kEpsProb, 1.0 - kEpsProb);
  };
  double a = 0.0;
  for (double p : prob_input) a += std::log(checked(p));
  double b = 0.0;
  for (double p : prob_reflectance) b += std::log(1.0 - checked(p));
  return -a / static_cast<double>(prob_input.size()) -
         b / static_cast<double>(prob_reflectance.size());
}

double loss_adversarial(const std::vector<double>& d_real,
                        const std::vector<double>& d_fake) {
  if (d_real.empty() || d_fake.empty())
    throw InvalidInput("loss_adversarial: empty score vector");
  double a = 0.0;
  for (double d : d_real) a += (d - 1.0) * (d - 1.0);
  double b = 0.0;
  for (double d : d_fake) b += d * d;
  return a / static_cast<double>(d_real.size()) +
         b / static_cast<double>(d_fake.size());
}

LossValue loss_translation(const Image& translated, const Image& target) {
  require_nonempty(translated, "loss_translation");
  require_same(translated, target, "loss_translation");
  LossValue out;
  out.grad_r =
      PixelField(translated.height(), translated.width(), translated.channels());
  const double inv_n = 1.0 / static_cast<double>(translated.size());
  for (std::size_t i = 0; i < translated.size(); ++i) {
    const double diff = translated.data()[i] - target.data()[i];
    out.value += std::fabs(diff) * inv_n;
    out.grad_r.v[i] = sgn(diff) * inv_n;
  }
  return out;
}

LossValue loss_diffuse(const Image& R, const Image& S, const Image& diffuse) {
  require_3ch(R, "loss_diffuse");
  require_3ch(diffuse, "loss_diffuse");
  require_same(R, diffuse, "loss_diffuse");
  if (S.channels() != 1 || S.height() != R.height() || S.width() != R.width())
    throw InvalidInput("loss_diffuse: S must be 1-channel with R's extent");
  LossValue out;
  out.grad_r = PixelField(R.height(), R.width(), 3);
  out.grad_s = PixelField(S.height(), S.width(), 1);
  out.value = diffuse_eval(R, S, diffuse, &out.grad_r, &out.grad_s);
  return out;
}

Stage1Frozen freeze_stage1(const Image& R, const Image& S) {
  return Stage1Frozen{gradsep_factors(R, S), sparse_weights(R)};
}

Stage1Result total_stage1(const Image& R, const Image& S, const Priors& priors,
                          const Image& I, const LossWeights& w,
                          bool with_grad) {
  return total_stage1(R, S, priors, I, w, freeze_stage1(R, S), with_grad);
}

Stage1Result total_stage1(const Image& R, const Image& S, const Priors& priors,
                          const Image& I, const LossWeights& w,
                          const Stage1Frozen& frozen, bool with_grad) {
  require_3ch(R, "total_stage1");
  require_3ch(I, "total_stage1");
  require_same(R, I, "total_stage1");
  require_same(R, priors.rho_sf, "total_stage1");
  require_same(R, priors.zeta_hf, "total_stage1");
  if (S.channels() != 1 || S.height() != R.height() || S.width() != R.width())
    throw InvalidInput("total_stage1: S must be 1-channel with R's extent");

  Stage1Result res;
  PixelField* gr = nullptr;
  PixelField* gs = nullptr;
  if (with_grad) {
    res.grad_r = PixelField(R.height(), R.width(), 3);
    res.grad_s = PixelField(S.height(), S.width(), 1);
    gr = &res.grad_r;
    gs = &res.grad_s;
  }

  // Each term accumulates weight * gradient directly into the totals.
  PixelField tmp_r, tmp_s;
  const auto add_r = [&](double weight) {
    if (!gr) return;
    for (std::size_t i = 0; i < gr->size(); ++i)
      gr->v[i] += weight * tmp_r.v[i];
  };
  const auto add_s = [&](double weight) {
    if (!gs) return;
    for (std::size_t i = 0; i < gs->size(); ++i)
      gs->v[i] += weight * tmp_s.v[i];
  };

  if (gr) tmp_r = PixelField(R.height(), R.width(), 3);
  res.terms.sf = sf_eval(R, priors.rho_sf, gr ? &tmp_r : nullptr);
  add_r(w.sf);

  if (gr) tmp_r = PixelField(R.height(), R.width(), 3);
  res.terms.hf = hf_eval(R, priors.zeta_hf, priors.lambda, gr ? &tmp_r : nullptr);
  add_r(w.hf);

  if (gr) tmp_r = PixelField(R.height(), R.width(), 3);
  if (gs) tmp_s = PixelField(S.height(), S.width(), 1);
  res.terms.grad = gradsep_eval(R, S, frozen.gradsep, gr ? &tmp_r : nullptr,
                                gs ? &tmp_s : nullptr);
  add_r(w.grad);
  add_s(w.grad);

  if (gs) tmp_s = PixelField(S.height(), S.width(), 1);
  res.terms.smooth = smooth_eval(S, gs ? &tmp_s : nullptr);
  add_s(w.smooth);

  if (gr) tmp_r = PixelField(R.height(), R.width(), 3);
  res.terms.sparse = sparse_eval(R, frozen.sparse, gr ? &tmp_r : nullptr);
  add_r(w.sparse);

  if (gr) tmp_r = PixelField(R.height(), R.width(), 3);
  if (gs) tmp_s = PixelField(S.height(), S.width(), 1);
  res.terms.rec =
      diffuse_eval(R, S, I, gr ? &tmp_r : nullptr, gs ? &tmp_s : nullptr);
  add_r(w.rec);
  add_s(w.rec);

  res.terms.total = w.sf * res.terms.sf + w.hf * res.terms.hf +
                    w.grad * res.terms.grad + w.smooth * res.terms.smooth +
                    w.sparse * res.terms.sparse + w.rec * res.terms.rec;
  return res;
}

}  // namespace iid
