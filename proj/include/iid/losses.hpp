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

#pragma once

#include <array>
#include <vector>

#include "iid/image.hpp"
#include "iid/specularfree.hpp"

namespace iid {

// Term weights. sf..sparse and rec drive the per-image decomposition
// objective; cls..diff belong to the training-time objective and are
// exposed for completeness of the loss suite.
struct LossWeights {
  double sf = 1.0;
  double hf = 1.0;
  double grad = 1.0;
  double smooth = 0.5;
  double sparse = 0.01;
  double rec = 10.0;

  double cls = 5.0;
  double adv = 1.0;
  double trans = 5.0;
  double diff = 1.0;
};

// Scalar loss with analytic gradients. grad_r is with respect to the first
// image argument, grad_s to the second where one exists (empty otherwise).
struct LossValue {
  double value = 0.0;
  PixelField grad_r;
  PixelField grad_s;
};

// Shadow-free and specular-free targets for one image, produced once from
// the input. lambda is the target max-chromaticity the specular-free prior
// was built with.
struct Priors {
  Image rho_sf;   // 3ch chromaticity target, sums to 1 per pixel
  Image zeta_hf;  // 3ch specular-free target
  double lambda = kDefaultMaxChroma;
};

// Mean L1 distance between the chromaticity of R and the shadow-free
// target. Gradient flows through the per-pixel normalization; black pixels
// (channel sum < kEpsBlack) contribute value only through the constant
// achromatic point and have zero gradient.
LossValue loss_shadow_free(const Image& R, const Image& rho_sf);

// Mean L1 distance between the specular-free transform of R and the target.
// Gradient flows through the per-pixel subtraction, including the argmax
// channel; channels clamped to zero by the transform get a zero subgradient.
LossValue loss_specular_free(const Image& R, const Image& zeta_hf,
                             double lambda = kDefaultMaxChroma);

// Scale-balancing factors of the gradient separation loss, one pair per
// pyramid level. They depend on R and S but are treated as constants by the
// gradient; capture them with gradsep_factors to hold them fixed across an
// evaluation (finite-difference checks need this).
struct GradSepFactors {
  std::array<double, 3> lambda_r{};
  std::array<double, 3> lambda_s{};
  std::array<bool, 3> active{};  // false: a gradient norm fell below kEpsGrad
};
GradSepFactors gradsep_factors(const Image& R, const Image& S);

// Sum over 3 bilinear pyramid levels of the Frobenius norm of
// tanh(lambda_r |grad R|) * tanh(lambda_s |grad S|), the 1-channel S
// gradient broadcast across R's channels. Penalizes edges that appear in
// both layers at once.
LossValue loss_gradient_separation(const Image& R, const Image& S);
LossValue loss_gradient_separation(const Image& R, const Image& S,
                                   const GradSepFactors& factors);

// Mean absolute forward difference of S (both axes).
LossValue loss_shading_smooth(const Image& S);

// Reweighting field 1 / (|grad R|^(1 - kSparsityP) + kEpsSparse); like the
// gradsep factors it is recomputed per call but constant to the gradient.
struct SparseWeights {
  PixelField wx;
  PixelField wy;
};
SparseWeights sparse_weights(const Image& R);

// Mean of weight * |grad R|: an lp (p = 0.5) edge sparsity penalty on
// reflectance, linearized at the current iterate.
LossValue loss_reflectance_sparse(const Image& R);
LossValue loss_reflectance_sparse(const Image& R, const SparseWeights& w);

// -mean log p over inputs classified as carrying illumination, plus
// -mean log(1-p) over reflectance outputs. Probabilities are clamped to
// [kEpsProb, 1 - kEpsProb]; values outside [0, 1] are rejected.
double loss_classification(const std::vector<double>& prob_input,
                           const std::vector<double>& prob_reflectance);

// Least-squares adversarial pair: mean (d_real - 1)^2 + mean d_fake^2.
double loss_adversarial(const std::vector<double>& d_real,
                        const std::vector<double>& d_fake);

// Mean L1 between a translated image and its target; gradient wrt the first
// argument.
LossValue loss_translation(const Image& translated, const Image& target);

// Mean L1 between R * S (1-channel S broadcast) and a diffuse target.
// Gradients wrt both R and S.
LossValue loss_diffuse(const Image& R, const Image& S, const Image& diffuse);

struct Stage1Terms {
  double sf = 0.0;
  double hf = 0.0;
  double grad = 0.0;
  double smooth = 0.0;
  double sparse = 0.0;
  double rec = 0.0;
  double total = 0.0;  // weighted sum
};

// Per-iterate factors that the decomposition objective holds fixed while
// differentiating.
struct Stage1Frozen {
  GradSepFactors gradsep;
  SparseWeights sparse;
};
Stage1Frozen freeze_stage1(const Image& R, const Image& S);

struct Stage1Result {
  Stage1Terms terms;
  PixelField grad_r;  // empty when with_grad is false
  PixelField grad_s;
};

// Full decomposition objective: weighted sf + hf + gradient separation +
// shading smoothness + reflectance sparsity + reconstruction |R*S - I|.
// The first overload freezes the factors at (R, S); the second evaluates at
// caller-supplied factors (line searches, finite differences).
Stage1Result total_stage1(const Image& R, const Image& S, const Priors& priors,
                          const Image& I, const LossWeights& w = {},
                          bool with_grad = true);
Stage1Result total_stage1(const Image& R, const Image& S, const Priors& priors,
                          const Image& I, const LossWeights& w,
                          const Stage1Frozen& frozen, bool with_grad = true);

}  // namespace iid
