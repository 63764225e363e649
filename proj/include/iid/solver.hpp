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

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "iid/losses.hpp"

namespace iid {

struct SolverConfig {
  int max_iters = 2000;
  double step_size = 0.05;       // initial gradient-descent step
  double step_decay = 0.5;       // applied when progress stalls
  int plateau_iters = 50;        // stall window for step decay
  double converge_rel = 1e-6;    // relative decrease treated as "no progress"
  int converge_window = 20;      // accepted steps the convergence test spans
  int max_backtracks = 30;       // step halvings per iteration before giving up

  enum class Init { from_input, from_priors };
  Init init = Init::from_input;

  double lambda = kDefaultMaxChroma;  // specular-free prior target
  // Invariant axis override; when unset the entropy sweep picks it.
  std::optional<double> theta_deg;
};

// Shadow-free / specular-free targets plus the invariant angle they were
// built with.
struct PreparedPriors {
  Priors priors;
  double theta_deg = 0.0;
};

// Compute both priors for an image. theta_deg overrides the entropy-sweep
// angle when given.
PreparedPriors prepare_priors(const Image& I,
                              std::optional<double> theta_deg = {},
                              double lambda = kDefaultMaxChroma);

struct DecompositionResult {
  Image reflectance;  // 3 channels, strictly positive
  Image shading;      // 1 channel, strictly positive
  // Objective after initialization and after every accepted step; strictly
  // decreasing by construction of the line search.
  std::vector<double> trace;
  Stage1Terms final_terms;
  double reconstruction_residual = 0.0;  // mean |R*S - I|
  bool converged = false;  // false: iteration budget ran out first
  int iterations = 0;      // accepted steps
  double theta_deg = 0.0;  // invariant angle the priors used
};

// Minimize the stage-1 objective over per-pixel log-reflectance and
// log-shading by gradient descent with a backtracking line search. The
// rebalancing factors inside the objective are refreshed at every accepted
// iterate and held constant while differentiating. Fully deterministic.
DecompositionResult decompose(const Image& I, const LossWeights& weights = {},
                              const SolverConfig& config = {});

// Max relative error between the supplied analytic gradients of f at (R, S)
// and central finite differences on a seeded coordinate subsample.
// Coordinates where both estimates are below 1e-12 are ignored. Image
// values must exceed h so the perturbed copies stay valid.
using Objective = std::function<double(const Image& R, const Image& S)>;
double grad_check(const Objective& f, const Image& R, const Image& S,
                  const PixelField& grad_r, const PixelField& grad_s,
                  double h = 1e-4, double subsample = 0.05,
                  std::uint64_t seed = 7);

}  // namespace iid
