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

namespace iid {

// Numeric guards, collected in one place. Each guard serves exactly one
// denominator or clamp; none of them is a tunable.

// Pixels whose channel sum falls below this are treated as black: their
// chromaticity is the achromatic point and they are masked out of the
// log-chromaticity plane.
inline constexpr double kEpsBlack = 1e-6;

// Added under the Frobenius norms when balancing reflectance against shading
// gradients, so empty gradient fields do not divide by zero.
inline constexpr double kEpsGrad = 1e-8;

// Stabilizer in the reweighting factor 1/(|g|^(1-p) + eps) of the sparse
// reflectance-gradient penalty.
inline constexpr double kEpsSparse = 1e-4;

// Probabilities are clamped to [eps, 1-eps] before any log.
inline constexpr double kEpsProb = 1e-7;

// Variance stabilizer under the square root in instance/layer normalization.
inline constexpr double kEpsNorm = 1e-5;

// Exponent p of the reweighted lp sparsity penalty on reflectance gradients.
inline constexpr double kSparsityP = 0.5;

}  // namespace iid
