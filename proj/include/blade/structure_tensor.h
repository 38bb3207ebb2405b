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

#ifndef BLADE_STRUCTURE_TENSOR_H_
#define BLADE_STRUCTURE_TENSOR_H_

#include <array>
#include <functional>
#include <vector>

#include "blade/image.h"

namespace blade {

// Gradient along the 45-degree rotated axes, sampled at cell centers
// (x + 1/2, y + 1/2). Dimensions are one less than the source image.
struct GradientField {
  int width = 0;
  int height = 0;
  std::vector<double> g1;  // (u(x+1,y) - u(x,y+1)) / sqrt(2)
  std::vector<double> g2;  // (u(x+1,y+1) - u(x,y)) / sqrt(2)
};

// Smoothed structure tensor (a, b, c) = G_rho * (g1^2, g1 g2, g2^2) on the
// original pixel grid. Components are in the rotated frame of the gradient.
struct TensorField {
  int width = 0;
  int height = 0;
  std::vector<double> a, b, c;

  size_t index(int x, int y) const {
    return static_cast<size_t>(y) * width + x;
  }
};

struct Features {
  double orientation = 0.0;  // gradient direction, radians in (-pi/2, pi/2]
  double strength = 0.0;     // sqrt(lambda1)
  double coherence = 0.0;    // in [0, 1]
};

// Eigensystem of [[a, b], [b, c]]. The eigenvector is the unnormalized
// dominant one in the tensor's own (rotated) frame.
struct TensorEigen {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
};

GradientField DiagonalGradient(const ImageGray& img);

// Taps of the even-length Gaussian sampled at +-1/2, +-3/2, ..., +-(L-1/2)
// with L = ceil(3 rho), normalized to sum 1. Index t corresponds to offset
// t - L + 1/2.
std::vector<double> HalfSampleGaussian(double rho);

// Returns a field one pixel larger than the gradient grid in each
// dimension, i.e. aligned with the source image.
TensorField SmoothTensor(const GradientField& grad, double rho);

TensorField StructureTensor(const ImageGray& img, double rho);

// Produces StructureTensor(img, rho) one row at a time from strips of the
// image, without materializing the gradient or tensor fields. The visitor
// receives row y as three arrays of img.width() values; rows arrive in no
// particular order and possibly from several threads at once. Values are
// bit-identical to StructureTensor.
using TensorRowVisitor =
    std::function<void(int y, const double* a, const double* b, const double* c)>;
void ForEachTensorRow(const ImageGray& img, double rho,
                      const TensorRowVisitor& visit);

TensorEigen EigenDecompose(double a, double b, double c);

// Unit gradient direction in image axes (rotated back by 45 degrees), or
// (0, 0) when the tensor is isotropic.
std::array<double, 2> DominantDirection(double a, double b, double c);

Features EigenFeatures(double a, double b, double c);

}  // namespace blade

#endif  // BLADE_STRUCTURE_TENSOR_H_
