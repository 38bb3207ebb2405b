// Copyright 2026 The BLADE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BLADE_REFERENCE_OPS_H_
#define BLADE_REFERENCE_OPS_H_

#include "blade/image.h"

namespace blade {

// Parameters for the reference operators that generate training targets.
struct FlowParams {
  // TV flow
  double dt = 0.1;
  int steps = 10;
  double epsilon = 1e-3 * 255.0;
  // Edge tangent flow (line integral convolution)
  double rho = 1.5;          // tangent field smoothing
  double half_length = 4.0;  // streamline arc length each way, pixels
  // Bilateral
  double sigma_r = 25.0;
  double sigma_s = 2.5;

  // Throws std::invalid_argument on out-of-range values.
  void Validate() const;
};

// Brute-force bilateral filter over a (2 ceil(3 sigma_s) + 1)^2 window with
// reflected borders and exact normalization.
ImageGray Bilateral(const ImageGray& img, double sigma_r, double sigma_s);

// Explicit curvature motion u_t = |grad u| div(grad u / |grad u|) with
// central differences and |grad u|_eps = sqrt(|grad u|^2 + eps^2).
ImageGray TvFlow(const ImageGray& img, const FlowParams& params);

// Line integral convolution along the edge tangent (minor eigenvector of
// the smoothed structure tensor): RK2 streamlines in 0.5 px steps out to
// half_length each way, Gaussian weights with sigma = half_length / 2,
// bilinear samples.
ImageGray EdgeTangentFlow(const ImageGray& img, const FlowParams& params);

}  // namespace blade

#endif  // BLADE_REFERENCE_OPS_H_
